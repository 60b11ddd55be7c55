//! The guide in `book/`, one module per chapter, so that `cargo test` runs
//! every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/metric-products.md")]
pub mod metric_products {}
#[doc = include_str!("../../../book/src/factorization.md")]
pub mod factorization {}
#[doc = include_str!("../../../book/src/normed-spaces.md")]
pub mod normed_spaces {}
#[doc = include_str!("../../../book/src/convex.md")]
pub mod convex {}
#[doc = include_str!("../../../book/src/loewner.md")]
pub mod loewner {}
#[doc = include_str!("../../../book/src/rigidity.md")]
pub mod rigidity {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
