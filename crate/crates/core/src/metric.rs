//! Finite metric spaces, their validation, and the ℓ2 direct product.
//!
//! The ℓ2 product law `d² = d_Y² + d_Z²` is additive on squared distances, so
//! most of the crate reasons about [`FiniteMetricSpace::squared`] rather than
//! about distances themselves.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distance matrix has {rows} rows but {labels} labels were given")]
    RowCount { rows: usize, labels: usize },
    #[error("row {row} of the distance matrix has {len} entries, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("distance ({i},{j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("tolerances must be strictly positive (got tol_metric={0}, tol_sq={1})")]
    Tolerance(f64, f64),
}

/// Absolute tolerances on distances and on squared distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub tol_metric: f64,
    pub tol_sq: f64,
}

impl Tolerance {
    pub fn new(tol_metric: f64, tol_sq: f64) -> Result<Self, MetricError> {
        if !(tol_metric > 0.0 && tol_sq > 0.0) {
            return Err(MetricError::Tolerance(tol_metric, tol_sq));
        }
        Ok(Self { tol_metric, tol_sq })
    }

    /// `1e-9` relative to the largest distance (and largest squared distance).
    pub fn for_space(space: &FiniteMetricSpace) -> Self {
        let m = space.max_distance().max(1e-300);
        let m = if space.len() < 2 { 1.0 } else { m };
        Self { tol_metric: 1e-9 * m, tol_sq: 1e-9 * m * m }
    }
}

/// A labeled finite point set with a dense distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: DMatrix<f64>,
}

impl FiniteMetricSpace {
    /// Structural checks only (shape and finiteness); metric axioms are
    /// checked by [`validate`].
    pub fn new(labels: Vec<String>, dist: DMatrix<f64>) -> Result<Self, MetricError> {
        if dist.nrows() != labels.len() {
            return Err(MetricError::RowCount { rows: dist.nrows(), labels: labels.len() });
        }
        if dist.ncols() != labels.len() {
            return Err(MetricError::RaggedRow { row: 0, len: dist.ncols(), expected: labels.len() });
        }
        for i in 0..dist.nrows() {
            for j in 0..dist.ncols() {
                if !dist[(i, j)].is_finite() {
                    return Err(MetricError::NonFinite { i, j });
                }
            }
        }
        Ok(Self { labels, dist })
    }

    pub fn from_rows(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = labels.len();
        if rows.len() != n {
            return Err(MetricError::RowCount { rows: rows.len(), labels: n });
        }
        let mut dist = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::RaggedRow { row: i, len: row.len(), expected: n });
            }
            for (j, &v) in row.iter().enumerate() {
                dist[(i, j)] = v;
            }
        }
        Self::new(labels, dist)
    }

    /// Points labeled `0, 1, …` with the given distance rows.
    pub fn unlabeled(rows: &[Vec<f64>]) -> Result<Self, MetricError> {
        Self::from_rows((0..rows.len()).map(|i| i.to_string()).collect(), rows)
    }

    /// Euclidean distances between the given coordinate vectors.
    pub fn from_points(points: &[Vec<f64>]) -> Self {
        let n = points.len();
        let dist = DMatrix::from_fn(n, n, |i, j| {
            points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        });
        Self { labels: (0..n).map(|i| i.to_string()).collect(), dist }
    }

    pub fn point() -> Self {
        Self { labels: vec!["0".into()], dist: DMatrix::zeros(1, 1) }
    }

    /// Two points at distance `d`.
    pub fn two_point(d: f64) -> Self {
        Self::from_points(&[vec![0.0], vec![d]])
    }

    /// Three collinear points with consecutive gaps `a` and `b`.
    pub fn path3(a: f64, b: f64) -> Self {
        Self::from_points(&[vec![0.0], vec![a], vec![a + b]])
    }

    /// Three points with the given pairwise distances `d01, d02, d12`.
    pub fn triangle(d01: f64, d02: f64, d12: f64) -> Self {
        Self::unlabeled(&[vec![0.0, d01, d02], vec![d01, 0.0, d12], vec![d02, d12, 0.0]]).expect("3x3")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dist(&self) -> &DMatrix<f64> {
        &self.dist
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    #[inline]
    pub fn sq(&self, i: usize, j: usize) -> f64 {
        let d = self.dist[(i, j)];
        d * d
    }

    pub fn max_distance(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// Entrywise squares of the distance matrix.
    pub fn squared(&self) -> DMatrix<f64> {
        self.dist.map(|d| d * d)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.len());
        self.labels = labels;
        self
    }

    /// Induced subspace on `points` (in the given order).
    pub fn subspace(&self, points: &[usize]) -> Self {
        let k = points.len();
        Self {
            labels: points.iter().map(|&i| self.labels[i].clone()).collect(),
            dist: DMatrix::from_fn(k, k, |a, b| self.dist[(points[a], points[b])]),
        }
    }

    /// The space reordered so that new point `i` is old point `order[i]`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len());
        self.subspace(order)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { labels: self.labels.clone(), dist: self.dist.map(|d| d * factor) }
    }
}

/// One failed metric axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Asymmetric { i: usize, j: usize, delta: f64 },
    NonzeroDiagonal { i: usize, value: f64 },
    NonPositive { i: usize, j: usize, value: f64 },
    /// `d(i,k) > d(i,j) + d(j,k)` by `excess`.
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks symmetry, zero diagonal, positivity and the triangle inequality
/// within `tol.tol_metric`.
pub fn validate(space: &FiniteMetricSpace, tol: &Tolerance) -> ValidationReport {
    let n = space.len();
    let t = tol.tol_metric;
    let mut violations = Vec::new();
    for i in 0..n {
        let dii = space.d(i, i);
        if dii.abs() > t {
            violations.push(Violation::NonzeroDiagonal { i, value: dii });
        }
        for j in i + 1..n {
            let delta = (space.d(i, j) - space.d(j, i)).abs();
            if delta > t {
                violations.push(Violation::Asymmetric { i, j, delta });
            }
            let v = space.d(i, j).min(space.d(j, i));
            if v <= 0.0 {
                violations.push(Violation::NonPositive { i, j, value: v });
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let excess = space.d(i, k) - space.d(i, j) - space.d(j, k);
                if excess > t {
                    violations.push(Violation::Triangle { i, j, k, excess });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Canonical label of a product point.
pub fn pair_label(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// The ℓ2 direct product. Point `(i, j)` sits at index `i · |Z| + j`.
pub fn product(y: &FiniteMetricSpace, z: &FiniteMetricSpace) -> FiniteMetricSpace {
    let (ny, nz) = (y.len(), z.len());
    let n = ny * nz;
    let mut labels = Vec::with_capacity(n);
    for i in 0..ny {
        for j in 0..nz {
            labels.push(pair_label(y.label(i), z.label(j)));
        }
    }
    let dist = DMatrix::from_fn(n, n, |p, q| {
        let (i1, j1) = (p / nz, p % nz);
        let (i2, j2) = (q / nz, q % nz);
        (y.sq(i1, i2) + z.sq(j1, j2)).sqrt()
    });
    FiniteMetricSpace { labels, dist }
}

/// Iterated product `F₁ × F₂ × … × Fₖ`; the empty product is a point.
pub fn product_all(factors: &[FiniteMetricSpace]) -> FiniteMetricSpace {
    let mut it = factors.iter();
    match it.next() {
        None => FiniteMetricSpace::point(),
        Some(first) => it.fold(first.clone(), |acc, f| product(&acc, f)),
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl Serialize for FiniteMetricSpace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.len();
        RawSpace {
            labels: self.labels.clone(),
            dist: (0..n).map(|i| (0..n).map(|j| self.d(i, j)).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteMetricSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawSpace::deserialize(d)?;
        FiniteMetricSpace::from_rows(raw.labels, &raw.dist).map_err(serde::de::Error::custom)
    }
}
