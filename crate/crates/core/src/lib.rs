//! Finite ℓ2-product metric spaces, product decompositions of normed spaces,
//! and the rigidity checks that tie the two together.

pub mod convex;
pub mod linalg;
pub mod loewner;
pub mod lp;
pub mod metric;
pub mod norm;
pub mod polytope;
pub mod factorize;
pub mod generate;
pub mod product;
pub mod rigidity;
