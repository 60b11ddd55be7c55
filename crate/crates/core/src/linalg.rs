//! Dense linear-algebra helpers: rank decisions, null spaces, subspaces and
//! the linear projections attached to a direct-sum splitting.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Pivot tolerance for every rank decision, relative to `max(1, σ_max)`.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("basis vectors have length {found}, expected ambient dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis is rank deficient: rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("subspaces of dimension {0} and {1} do not form a direct sum of the ambient space (rank {2})")]
    NotComplementary(usize, usize, usize),
}

/// Eigenpairs of `[[0, m], [mᵀ, 0]]`, whose eigenvalues are `±σᵢ` (and
/// zeros) with eigenvectors `(uᵢ, ±vᵢ)/√2`.
fn augmented_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let (n, c) = m.shape();
    let mut j = DMatrix::zeros(n + c, n + c);
    j.view_mut((0, n), (n, c)).copy_from(m);
    j.view_mut((n, 0), (c, n)).copy_from(&m.transpose());
    let e = j.symmetric_eigen();
    (e.eigenvalues, e.eigenvectors)
}

/// Singular triplets `(σᵢ, uᵢ, vᵢ)` of `m` above the pivot tolerance, as
/// `(σ, U, V)` with `m ≈ U diag(σ) Vᵀ`.
pub fn singular_triplets(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (n, c) = m.shape();
    if n == 0 || c == 0 {
        return (Vec::new(), DMatrix::zeros(n, 0), DMatrix::zeros(c, 0));
    }
    let (vals, vecs) = augmented_eigen(m);
    let top = vals.iter().cloned().fold(0.0_f64, f64::max);
    let tol = PIVOT_TOL * top.max(1.0);
    let mut keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > tol).collect();
    keep.sort_by(|&x, &y| vals[y].total_cmp(&vals[x]));
    let sigma = keep.iter().map(|&i| vals[i]).collect();
    let mut u = DMatrix::zeros(n, keep.len());
    let mut v = DMatrix::zeros(c, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let col = vecs.column(i);
        u.set_column(k, &col.rows(0, n).normalize());
        v.set_column(k, &col.rows(n, c).normalize());
    }
    (sigma, u, v)
}

/// Numerical rank with the crate-wide pivot tolerance.
pub fn rank(m: &DMatrix<f64>) -> usize {
    singular_triplets(m).0.len()
}

/// Orthonormal basis of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    singular_triplets(m).1
}

/// Orthonormal basis of `{x : m x = 0}`.
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let c = m.ncols();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    let v = singular_triplets(m).2;
    let rest = (DMatrix::identity(c, c) - &v * v.transpose()).symmetric_eigen();
    let keep: Vec<usize> = (0..c).filter(|&i| rest.eigenvalues[i] > 0.5).collect();
    let mut out = DMatrix::zeros(c, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &rest.eigenvectors.column(i));
    }
    out
}

/// Moore–Penrose inverse with the crate-wide pivot tolerance.
pub fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (sigma, u, v) = singular_triplets(m);
    let inv = DVector::from_iterator(sigma.len(), sigma.iter().map(|s| 1.0 / s));
    v * DMatrix::from_diagonal(&inv) * u.transpose()
}

/// Unit `v` minimizing `‖m v‖` for square `m`.
pub fn smallest_right_singular_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let (n, c) = m.shape();
    let (_, vecs) = augmented_eigen(m);
    (0..vecs.ncols())
        .map(|i| vecs.column(i).rows(n, c).into_owned())
        .filter(|v| v.norm() > 0.25)
        .map(|v| v.normalize())
        .min_by(|x, y| (m * x).norm().total_cmp(&(m * y).norm()))
        .unwrap_or_else(|| DVector::from_fn(c, |i, _| if i == 0 { 1.0 } else { 0.0 }))
}

pub fn columns_to_matrix(n: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

/// A linear subspace of `ℝⁿ` given by a basis with full column rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(basis: DMatrix<f64>) -> Result<Self, LinalgError> {
        let r = rank(&basis);
        if r < basis.ncols() {
            return Err(LinalgError::RankDeficient { rank: r, cols: basis.ncols() });
        }
        Ok(Self { basis })
    }

    pub fn from_vectors(ambient: usize, vectors: &[Vec<f64>]) -> Result<Self, LinalgError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(LinalgError::DimensionMismatch { expected: ambient, found: v.len() });
            }
        }
        let cols: Vec<DVector<f64>> = vectors.iter().map(|v| DVector::from_column_slice(v)).collect();
        Self::new(columns_to_matrix(ambient, &cols))
    }

    /// Span of arbitrary (possibly dependent) vectors, returned with an orthonormal basis.
    pub fn span(ambient: usize, vectors: &[DVector<f64>]) -> Self {
        Self { basis: column_space(&columns_to_matrix(ambient, vectors)) }
    }

    pub fn span_of(m: &DMatrix<f64>) -> Self {
        Self { basis: column_space(m) }
    }

    pub fn zero(ambient: usize) -> Self {
        Self { basis: DMatrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Self { basis: DMatrix::identity(ambient, ambient) }
    }

    /// Span of the listed standard basis vectors.
    pub fn coordinate(ambient: usize, axes: &[usize]) -> Self {
        let mut b = DMatrix::zeros(ambient, axes.len());
        for (j, &i) in axes.iter().enumerate() {
            b[(i, j)] = 1.0;
        }
        Self { basis: b }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vector(&self, j: usize) -> DVector<f64> {
        self.basis.column(j).into_owned()
    }

    pub fn orthonormal(&self) -> DMatrix<f64> {
        column_space(&self.basis)
    }

    /// Point of the subspace with the given coordinates in its basis.
    pub fn embed(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.basis * coords
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let n = self.ambient_dim();
        if self.is_trivial() || other.is_trivial() {
            return Subspace::zero(n);
        }
        let stacked = hstack(&self.basis, &(-other.basis.clone()));
        let ns = null_space(&stacked);
        let coeff = ns.rows(0, self.dim()).into_owned();
        Subspace::span_of(&(&self.basis * coeff))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span_of(&hstack(&self.basis, &other.basis))
    }

    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        if self.is_trivial() {
            return v.norm() <= tol;
        }
        let q = self.orthonormal();
        let r = v - &q * (q.transpose() * v);
        r.norm() <= tol * v.norm().max(1.0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        (0..other.dim()).all(|j| self.contains(&other.vector(j), 1e-8))
    }

    /// Same subspace regardless of basis.
    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other)
    }

    pub fn transform(&self, t: &DMatrix<f64>) -> Subspace {
        Subspace { basis: t * &self.basis }
    }

    /// Orthogonal complement with respect to the inner product `⟨u, v⟩ = uᵀ G v`.
    pub fn complement(&self, gram: &DMatrix<f64>) -> Subspace {
        let n = self.ambient_dim();
        if self.is_trivial() {
            return Subspace::full(n);
        }
        let constraints = self.basis.transpose() * gram;
        Subspace { basis: null_space(&constraints) }
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cols: Vec<Vec<f64>> = (0..self.dim()).map(|j| self.basis.column(j).iter().cloned().collect()).collect();
        cols.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let cols: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = cols.first().map(|c| c.len()).unwrap_or(0);
        Subspace::from_vectors(n, &cols).map_err(serde::de::Error::custom)
    }
}

/// Two complementary subspaces `S₁ ⊕ S₂ = ℝⁿ` and the linear projections
/// `P¹` (along `S₂`) and `P²` (along `S₁`).
#[derive(Clone, Debug)]
pub struct Splitting {
    first: Subspace,
    second: Subspace,
    inverse: DMatrix<f64>,
}

impl Splitting {
    pub fn new(first: &Subspace, second: &Subspace) -> Result<Self, LinalgError> {
        let n = first.ambient_dim();
        let t = hstack(first.basis(), second.basis());
        let r = rank(&t);
        if first.dim() + second.dim() != n || r != n {
            return Err(LinalgError::NotComplementary(first.dim(), second.dim(), r));
        }
        let inverse = t.try_inverse().ok_or(LinalgError::NotComplementary(first.dim(), second.dim(), r))?;
        Ok(Self { first: first.clone(), second: second.clone(), inverse })
    }

    pub fn first(&self) -> &Subspace {
        &self.first
    }

    pub fn second(&self) -> &Subspace {
        &self.second
    }

    /// Coordinates of `v` in the first and second basis.
    pub fn coords(&self, v: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let c = &self.inverse * v;
        let k = self.first.dim();
        (c.rows(0, k).into_owned(), c.rows(k, c.len() - k).into_owned())
    }

    pub fn project_first(&self, v: &DVector<f64>) -> DVector<f64> {
        self.first.embed(&self.coords(v).0)
    }

    pub fn project_second(&self, v: &DVector<f64>) -> DVector<f64> {
        self.second.embed(&self.coords(v).1)
    }

    /// Matrix of the projection onto the first subspace along the second.
    pub fn projector_first(&self) -> DMatrix<f64> {
        let k = self.first.dim();
        self.first.basis() * self.inverse.rows(0, k)
    }

    pub fn projector_second(&self) -> DMatrix<f64> {
        let k = self.first.dim();
        self.second.basis() * self.inverse.rows(k, self.inverse.nrows() - k)
    }
}
