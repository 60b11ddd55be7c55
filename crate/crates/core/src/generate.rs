//! Seeded instance factories with their planted structure attached.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{hstack, rank, Subspace};
use crate::metric::{product_all, FiniteMetricSpace};
use crate::norm::{gaussian, NormError, NormedSpace};

/// Planted factors of a product metric and the coordinates of every point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricTruth {
    pub factors: Vec<FiniteMetricSpace>,
    /// `coordinates[p][i]`: the point of `factors[i]` under `p`.
    pub coordinates: Vec<Vec<usize>>,
    /// `permutation[p]` is the index of `p` before shuffling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairTruth {
    pub a: Subspace,
    pub abar: Subspace,
    pub b: Subspace,
    pub bbar: Subspace,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    RandomProductMetric { space: FiniteMetricSpace, ground_truth: MetricTruth },
    ShuffledProduct { space: FiniteMetricSpace, ground_truth: MetricTruth },
    RandomPolytopeNorm { norm: NormedSpace, ground_truth: Vec<Vec<f64>> },
    ProductNorm { norm: NormedSpace, ground_truth: Vec<Subspace> },
    RotatedEuclideanPair { norm: NormedSpace, ground_truth: PairTruth },
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// A generic metric on `k` points: random points of `ℝ³`.
fn random_factor(rng: &mut ChaCha8Rng, k: usize) -> FiniteMetricSpace {
    let pts: Vec<Vec<f64>> = (0..k).map(|_| gaussian(rng, 3).iter().copied().collect()).collect();
    FiniteMetricSpace::from_points(&pts)
}

fn product_coordinates(sizes: &[usize]) -> Vec<Vec<usize>> {
    let n: usize = sizes.iter().product();
    (0..n)
        .map(|mut p| {
            let mut c = vec![0; sizes.len()];
            for i in (0..sizes.len()).rev() {
                c[i] = p % sizes[i];
                p /= sizes[i];
            }
            c
        })
        .collect()
}

fn check_sizes(sizes: &[usize]) -> Result<(), GenerateError> {
    if sizes.is_empty() || sizes.iter().any(|&k| k < 2) {
        return Err(GenerateError::Param("factor sizes must be at least 2".into()));
    }
    if sizes.iter().product::<usize>() > 4096 {
        return Err(GenerateError::Param("product has more than 4096 points".into()));
    }
    Ok(())
}

pub fn random_product_metric(sizes: &[usize], seed: u64) -> Result<Instance, GenerateError> {
    check_sizes(sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<FiniteMetricSpace> = sizes.iter().map(|&k| random_factor(&mut rng, k)).collect();
    let space = product_all(&factors);
    let coordinates = product_coordinates(sizes);
    Ok(Instance::RandomProductMetric { space, ground_truth: MetricTruth { factors, coordinates, permutation: None } })
}

pub fn shuffled_product(sizes: &[usize], seed: u64) -> Result<Instance, GenerateError> {
    check_sizes(sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<FiniteMetricSpace> = sizes.iter().map(|&k| random_factor(&mut rng, k)).collect();
    let base = product_all(&factors);
    let mut order: Vec<usize> = (0..base.len()).collect();
    order.shuffle(&mut rng);
    let space = base.reordered(&order);
    let coords = product_coordinates(sizes);
    let coordinates = order.iter().map(|&p| coords[p].clone()).collect();
    Ok(Instance::ShuffledProduct { space, ground_truth: MetricTruth { factors, coordinates, permutation: Some(order) } })
}

/// Symmetric polytope norm on `ℝᵈ` with `m` random vertex pairs.
pub fn random_polytope_norm(dim: usize, m: usize, seed: u64) -> Result<Instance, GenerateError> {
    if dim == 0 || m < dim {
        return Err(GenerateError::Param("need at least `dim` vertices in positive dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let vs: Vec<DVector<f64>> = (0..m).map(|_| gaussian(&mut rng, dim)).collect();
        if rank(&DMatrix::from_columns(&vs)) < dim {
            continue;
        }
        let truth = vs.iter().map(|v| v.iter().copied().collect()).collect();
        return Ok(Instance::RandomPolytopeNorm { norm: NormedSpace::vertices(vs)?, ground_truth: truth });
    }
}

/// Product of the given norms on consecutive coordinate blocks.
pub fn product_norm(components: Vec<NormedSpace>) -> Result<Instance, GenerateError> {
    if components.len() < 2 {
        return Err(GenerateError::Param("a product needs at least two components".into()));
    }
    let n: usize = components.iter().map(|c| c.dim()).sum();
    let mut blocks = Vec::new();
    let mut offset = 0;
    for c in &components {
        blocks.push(Subspace::coordinate(n, &(offset..offset + c.dim()).collect::<Vec<_>>()));
        offset += c.dim();
    }
    Ok(Instance::ProductNorm { norm: NormedSpace::product_of(components), ground_truth: blocks })
}

fn transversal(s: &Subspace, t: &Subspace) -> bool {
    rank(&hstack(s.basis(), t.basis())) == s.dim() + t.dim()
}

/// Random inner product on `ℝᵈ` (`d` even) with two pairs of orthogonal
/// half-dimensional subspaces in general position.
pub fn rotated_euclidean_pair(dim: usize, seed: u64) -> Result<Instance, GenerateError> {
    if dim < 2 || dim % 2 == 1 {
        return Err(GenerateError::Param("dimension must be even and positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = DMatrix::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { 0.0 }) + DMatrix::from_columns(&(0..dim).map(|_| gaussian(&mut rng, dim) * 0.4).collect::<Vec<_>>());
    let g = t.transpose() * t;
    let half = |rng: &mut ChaCha8Rng| {
        let s = Subspace::span_of(&DMatrix::from_columns(&(0..dim / 2).map(|_| gaussian(rng, dim)).collect::<Vec<_>>()));
        let c = s.complement(&g);
        (s, c)
    };
    loop {
        let (a, abar) = half(&mut rng);
        let (b, bbar) = half(&mut rng);
        let ok = [(&a, &b), (&a, &bbar), (&abar, &b), (&abar, &bbar)].iter().all(|(s, t)| transversal(s, t));
        if ok {
            return Ok(Instance::RotatedEuclideanPair { norm: NormedSpace::gram(g)?, ground_truth: PairTruth { a, abar, b, bbar } });
        }
    }
}
