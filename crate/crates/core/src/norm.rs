//! Finite-dimensional normed spaces: evaluation, support functionals, unit
//! ball combinatorics for polyhedral forms, product norms, and the sampled
//! test for isometric product decompositions.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{hstack, rank, LinalgError, Splitting, Subspace};
use crate::lp::{self, LpOutcome};
use crate::polytope::{dedup_points, extreme_points, facets, vertices_of};

/// Relative tolerance of the Pythagorean norm identity.
pub const PRODUCT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("vector has dimension {found}, space has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unit ball has empty interior")]
    Degenerate,
    #[error("p-norm exponent {0} is below 1")]
    BadExponent(f64),
    #[error("gram matrix is not symmetric positive-definite")]
    NotPositiveDefinite,
    #[error("product bases do not form a basis of the ambient space")]
    BadBases,
    #[error("linear map is not injective or has the wrong shape")]
    BadMap,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone)]
pub enum NormForm {
    /// Unit ball `conv(±vᵢ)`.
    Vertices(Vec<DVector<f64>>),
    /// `‖v‖ = maxᵢ |⟨aᵢ, v⟩|`.
    Facets(Vec<DVector<f64>>),
    /// `ℓp` with `p ∈ [1, ∞]`.
    PNorm(f64),
    /// `‖v‖ = √(vᵀ G v)`.
    Gram(DMatrix<f64>),
    /// `‖Σ Bᵢcᵢ‖ = √(Σ ‖cᵢ‖ᵢ²)`; `inverse` maps `v` to the stacked `cᵢ`.
    Product { components: Vec<NormedSpace>, bases: Vec<DMatrix<f64>>, inverse: DMatrix<f64> },
    /// `‖v‖ = ‖T v‖_inner` for injective `T`.
    Linear { inner: Box<NormedSpace>, map: DMatrix<f64> },
}

#[derive(Debug, Clone)]
pub struct NormedSpace {
    dim: usize,
    form: NormForm,
    /// Facet functionals, cached for vertex forms of small dimension.
    facet_cache: Option<Vec<DVector<f64>>>,
}

fn symmetric_closure(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut all: Vec<DVector<f64>> = points.to_vec();
    all.extend(points.iter().map(|p| -p));
    dedup_points(&all)
}

impl NormedSpace {
    pub fn vertices(vertices: Vec<DVector<f64>>) -> Result<Self, NormError> {
        let dim = vertices.first().map_or(0, |v| v.len());
        for v in &vertices {
            if v.len() != dim {
                return Err(NormError::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        let closed = symmetric_closure(&vertices);
        if rank(&crate::linalg::columns_to_matrix(dim, &closed)) < dim {
            return Err(NormError::Degenerate);
        }
        let keep = extreme_points(&closed, &[]);
        let verts: Vec<DVector<f64>> = keep.into_iter().map(|i| closed[i].clone()).collect();
        let facet_cache = (dim <= 4).then(|| facets(&verts).into_iter().map(|h| h.normal / h.offset).collect());
        Ok(Self { dim, form: NormForm::Vertices(verts), facet_cache })
    }

    pub fn facets(functionals: Vec<DVector<f64>>) -> Result<Self, NormError> {
        let dim = functionals.first().map_or(0, |v| v.len());
        for a in &functionals {
            if a.len() != dim {
                return Err(NormError::DimensionMismatch { expected: dim, found: a.len() });
            }
        }
        if rank(&crate::linalg::columns_to_matrix(dim, &functionals)) < dim {
            return Err(NormError::Degenerate);
        }
        Ok(Self { dim, form: NormForm::Facets(dedup_points(&symmetric_closure(&functionals))), facet_cache: None })
    }

    pub fn p_norm(p: f64, dim: usize) -> Result<Self, NormError> {
        if p.is_nan() || p < 1.0 {
            return Err(NormError::BadExponent(p));
        }
        Ok(Self { dim, form: NormForm::PNorm(p), facet_cache: None })
    }

    pub fn l1(dim: usize) -> Self {
        Self::p_norm(1.0, dim).expect("valid exponent")
    }

    pub fn linf(dim: usize) -> Self {
        Self::p_norm(f64::INFINITY, dim).expect("valid exponent")
    }

    pub fn gram(matrix: DMatrix<f64>) -> Result<Self, NormError> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(NormError::NotPositiveDefinite);
        }
        let sym = (&matrix - matrix.transpose()).amax() <= 1e-12 * matrix.amax().max(1.0);
        if !sym || (dim > 0 && matrix.clone().cholesky().is_none()) {
            return Err(NormError::NotPositiveDefinite);
        }
        Ok(Self { dim, form: NormForm::Gram(matrix), facet_cache: None })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::gram(DMatrix::identity(dim, dim)).expect("identity is positive-definite")
    }

    /// Product norm with component `i` living on the columns of `bases[i]`.
    pub fn product(components: Vec<NormedSpace>, bases: Vec<DMatrix<f64>>) -> Result<Self, NormError> {
        if components.len() != bases.len() {
            return Err(NormError::BadBases);
        }
        let dim: usize = components.iter().map(|c| c.dim).sum();
        let mut t = DMatrix::zeros(dim, 0);
        for (c, b) in components.iter().zip(&bases) {
            if b.ncols() != c.dim || b.nrows() != dim {
                return Err(NormError::BadBases);
            }
            t = hstack(&t, b);
        }
        if rank(&t) < dim {
            return Err(NormError::BadBases);
        }
        let inverse = if dim == 0 { t.clone() } else { t.try_inverse().ok_or(NormError::BadBases)? };
        Ok(Self { dim, form: NormForm::Product { components, bases, inverse }, facet_cache: None })
    }

    /// Product norm on `ℝ^{d₁} × … × ℝ^{dₖ}` with coordinate blocks.
    pub fn product_of(components: Vec<NormedSpace>) -> Self {
        let dim: usize = components.iter().map(|c| c.dim).sum();
        let mut offset = 0;
        let bases = components
            .iter()
            .map(|c| {
                let mut b = DMatrix::zeros(dim, c.dim);
                for j in 0..c.dim {
                    b[(offset + j, j)] = 1.0;
                }
                offset += c.dim;
                b
            })
            .collect();
        Self::product(components, bases).expect("block bases are complementary")
    }

    /// `‖v‖ = ‖T v‖_inner`.
    pub fn linear(inner: NormedSpace, map: DMatrix<f64>) -> Result<Self, NormError> {
        if map.nrows() != inner.dim || rank(&map) < map.ncols() {
            return Err(NormError::BadMap);
        }
        Ok(Self { dim: map.ncols(), form: NormForm::Linear { inner: Box::new(inner), map }, facet_cache: None })
    }

    /// The norm whose unit ball is `T(K)` for invertible `T`.
    pub fn distorted(&self, t: &DMatrix<f64>) -> Result<Self, NormError> {
        let inv = t.clone().try_inverse().ok_or(NormError::BadMap)?;
        Self::linear(self.clone(), inv)
    }

    /// The restriction to `s`, in the coordinates of `s`'s basis.
    pub fn restrict(&self, s: &Subspace) -> Result<Self, NormError> {
        if s.ambient_dim() != self.dim {
            return Err(NormError::DimensionMismatch { expected: self.dim, found: s.ambient_dim() });
        }
        Self::linear(self.clone(), s.basis().clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &NormForm {
        &self.form
    }

    fn check(&self, v: &DVector<f64>) -> Result<(), NormError> {
        if v.len() != self.dim {
            return Err(NormError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(())
    }

    pub fn norm(&self, v: &DVector<f64>) -> Result<f64, NormError> {
        self.check(v)?;
        Ok(self.eval(v))
    }

    /// Norm without the dimension check.
    pub fn eval(&self, v: &DVector<f64>) -> f64 {
        self.eval_with_functional(v).0
    }

    /// A norming functional: `f(v) = ‖v‖` and `|f(u)| ≤ ‖u‖` for all `u`.
    pub fn support_functional(&self, v: &DVector<f64>) -> Result<DVector<f64>, NormError> {
        self.check(v)?;
        Ok(self.eval_with_functional(v).1)
    }

    fn eval_with_functional(&self, v: &DVector<f64>) -> (f64, DVector<f64>) {
        if let Some(fs) = &self.facet_cache {
            return max_functional(fs, v);
        }
        match &self.form {
            NormForm::Facets(fs) => max_functional(fs, v),
            NormForm::Vertices(vs) => gauge(vs, v),
            NormForm::PNorm(p) => p_norm_with_functional(*p, v),
            NormForm::Gram(g) => {
                let gv = g * v;
                let n = v.dot(&gv).max(0.0).sqrt();
                if n == 0.0 {
                    (0.0, DVector::zeros(v.len()))
                } else {
                    (n, gv / n)
                }
            }
            NormForm::Product { components, inverse, .. } => {
                let c = inverse * v;
                let mut offset = 0;
                let mut norms = Vec::with_capacity(components.len());
                let mut parts = Vec::with_capacity(components.len());
                for comp in components {
                    let ci = c.rows(offset, comp.dim).into_owned();
                    let (n, f) = comp.eval_with_functional(&ci);
                    norms.push(n);
                    parts.push(f);
                    offset += comp.dim;
                }
                let total = norms.iter().map(|n| n * n).sum::<f64>().sqrt();
                let mut stacked = DVector::zeros(self.dim);
                if total > 0.0 {
                    let mut offset = 0;
                    for (n, f) in norms.iter().zip(&parts) {
                        stacked.rows_mut(offset, f.len()).copy_from(&(f * (n / total)));
                        offset += f.len();
                    }
                }
                (total, inverse.transpose() * stacked)
            }
            NormForm::Linear { inner, map } => {
                let (n, f) = inner.eval_with_functional(&(map * v));
                (n, map.transpose() * f)
            }
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        match &self.form {
            NormForm::Vertices(_) | NormForm::Facets(_) => true,
            NormForm::PNorm(p) => *p == 1.0 || p.is_infinite(),
            NormForm::Gram(_) => self.dim <= 1,
            NormForm::Product { components, .. } => {
                components.iter().filter(|c| c.dim > 0).count() <= 1 && components.iter().all(|c| c.is_polyhedral())
            }
            NormForm::Linear { inner, .. } => inner.is_polyhedral(),
        }
    }

    /// Functionals `aᵢ` with `‖v‖ = maxᵢ |⟨aᵢ, v⟩|`, for polyhedral norms.
    pub fn facet_functionals(&self) -> Option<Vec<DVector<f64>>> {
        self.facet_functionals_impl(true)
    }

    /// As [`Self::facet_functionals`], but `None` when the facets would have
    /// to be enumerated from a vertex list.
    pub fn known_facet_functionals(&self) -> Option<Vec<DVector<f64>>> {
        self.facet_functionals_impl(false)
    }

    fn facet_functionals_impl(&self, enumerate: bool) -> Option<Vec<DVector<f64>>> {
        if let Some(fs) = &self.facet_cache {
            return Some(fs.clone());
        }
        let d = self.dim;
        match &self.form {
            NormForm::Facets(fs) => Some(fs.clone()),
            NormForm::Vertices(vs) if enumerate => Some(facets(vs).into_iter().map(|h| h.normal / h.offset).collect()),
            NormForm::PNorm(p) if p.is_infinite() => {
                Some((0..d).flat_map(|i| [unit(d, i, 1.0), unit(d, i, -1.0)]).collect())
            }
            NormForm::PNorm(p) if *p == 1.0 => Some(sign_vectors(d)),
            NormForm::Gram(g) if d == 1 => {
                let s = g[(0, 0)].sqrt();
                Some(vec![DVector::from_element(1, s), DVector::from_element(1, -s)])
            }
            NormForm::Linear { inner, map } => {
                let fs = inner.facet_functionals_impl(enumerate)?;
                let mapped: Vec<DVector<f64>> = fs.iter().map(|a| map.transpose() * a).filter(|a| a.norm() > 1e-14).collect();
                Some(dedup_points(&mapped))
            }
            NormForm::Product { components, inverse, .. } if self.is_polyhedral() => {
                let mut offset = 0;
                for c in components {
                    if c.dim > 0 {
                        let fs = c.facet_functionals_impl(enumerate)?;
                        let mut out = Vec::with_capacity(fs.len());
                        for a in fs {
                            let mut stacked = DVector::zeros(d);
                            stacked.rows_mut(offset, c.dim).copy_from(&a);
                            out.push(inverse.transpose() * stacked);
                        }
                        return Some(out);
                    }
                    offset += c.dim;
                }
                None
            }
            _ => None,
        }
    }

    /// Vertices of the unit ball, for polyhedral norms.
    pub fn ball_vertices(&self) -> Option<Vec<DVector<f64>>> {
        let d = self.dim;
        match &self.form {
            NormForm::Vertices(vs) => Some(vs.clone()),
            NormForm::PNorm(p) if *p == 1.0 => Some((0..d).flat_map(|i| [unit(d, i, 1.0), unit(d, i, -1.0)]).collect()),
            NormForm::PNorm(p) if p.is_infinite() => Some(sign_vectors(d)),
            _ => {
                let fs = self.facet_functionals()?;
                let g = crate::linalg::columns_to_matrix(d, &fs).transpose();
                Some(vertices_of(&g, &DVector::from_element(fs.len(), 1.0)))
            }
        }
    }

    /// Spot-checks homogeneity, symmetry and the triangle inequality on
    /// seeded samples; returns the worst relative residual.
    pub fn axiom_residual(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let u = gaussian(&mut rng, self.dim);
            let w = gaussian(&mut rng, self.dim);
            let lambda: f64 = StandardNormal.sample(&mut rng);
            let nu = self.eval(&u);
            let nw = self.eval(&w);
            let scale = nu.max(nw).max(1e-300);
            worst = worst.max((self.eval(&(&u * lambda)) - lambda.abs() * nu).abs() / (scale * lambda.abs().max(1.0)));
            worst = worst.max((self.eval(&-&u) - nu).abs() / scale);
            worst = worst.max((self.eval(&(&u + &w)) - nu - nw).max(0.0) / scale);
        }
        worst
    }
}

fn unit(d: usize, i: usize, s: f64) -> DVector<f64> {
    let mut e = DVector::zeros(d);
    e[i] = s;
    e
}

fn sign_vectors(d: usize) -> Vec<DVector<f64>> {
    (0..1usize << d)
        .map(|mask| DVector::from_fn(d, |i, _| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }))
        .collect()
}

pub(crate) fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| StandardNormal.sample(rng))
}

fn max_functional(fs: &[DVector<f64>], v: &DVector<f64>) -> (f64, DVector<f64>) {
    let mut best = (0.0, DVector::zeros(v.len()));
    for a in fs {
        let s = a.dot(v);
        if s.abs() > best.0 {
            best = (s.abs(), if s >= 0.0 { a.clone() } else { -a });
        }
    }
    best
}

/// Minkowski functional of `conv(vs)` and a norming functional, from
/// `max vᵀy  s.t.  wᵀy ≤ 1` for every vertex `w`.
fn gauge(vs: &[DVector<f64>], v: &DVector<f64>) -> (f64, DVector<f64>) {
    let d = v.len();
    if v.norm() == 0.0 {
        return (0.0, DVector::zeros(d));
    }
    let g = crate::linalg::columns_to_matrix(d, vs).transpose();
    let c: Vec<f64> = v.iter().cloned().collect();
    match lp::maximize_free(&c, &g, &vec![1.0; vs.len()]) {
        LpOutcome::Optimal(s) => (s.objective, DVector::from_vec(s.x)),
        _ => (f64::INFINITY, DVector::zeros(d)),
    }
}

fn p_norm_with_functional(p: f64, v: &DVector<f64>) -> (f64, DVector<f64>) {
    let d = v.len();
    if p.is_infinite() {
        let (i, m) = v.iter().enumerate().fold((0, 0.0_f64), |(bi, bm), (i, x)| if x.abs() > bm { (i, x.abs()) } else { (bi, bm) });
        if m == 0.0 {
            return (0.0, DVector::zeros(d));
        }
        return (m, unit(d, i, v[i].signum()));
    }
    if p == 1.0 {
        let n = v.abs().sum();
        return (n, v.map(|x| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 }));
    }
    let m = v.amax();
    if m == 0.0 {
        return (0.0, DVector::zeros(d));
    }
    // Scale by the max entry to avoid overflow in |x|^p.
    let s: f64 = v.iter().map(|x| (x.abs() / m).powf(p)).sum();
    let n = m * s.powf(1.0 / p);
    let f = v.map(|x| x.signum() * (x.abs() / n).powf(p - 1.0));
    (n, f)
}

/// `dim(space1 × space2) = dim(space1) + dim(space2)`.
pub fn hull_dimension_additivity(space1: &NormedSpace, space2: &NormedSpace) -> bool {
    let p = NormedSpace::product_of(vec![space1.clone(), space2.clone()]);
    p.dim() == space1.dim() + space2.dim()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductCheck {
    pub holds: bool,
    /// Largest `|‖v₁+v₂‖² − ‖v₁‖² − ‖v₂‖²| / (‖v₁‖² + ‖v₂‖²)`.
    pub worst_residual: f64,
    pub worst_pair: Option<(Vec<f64>, Vec<f64>)>,
    pub pairs_checked: usize,
}

fn critical_directions(space: &NormedSpace, s: &Subspace) -> Vec<DVector<f64>> {
    if !space.is_polyhedral() || s.is_trivial() {
        return Vec::new();
    }
    let Ok(restricted) = space.restrict(s) else { return Vec::new() };
    let mut out: Vec<DVector<f64>> = restricted
        .ball_vertices()
        .unwrap_or_default()
        .iter()
        .map(|c| s.embed(c))
        .collect();
    out.truncate(256);
    out
}

/// Tests `‖v₁ + v₂‖² = ‖v₁‖² + ‖v₂‖²` for `v₁ ∈ s1`, `v₂ ∈ s2` on seeded
/// samples plus, for polyhedral norms, all pairs of ball vertices of the two
/// restrictions at several relative scales.
pub fn is_product_decomposition(
    space: &NormedSpace,
    s1: &Subspace,
    s2: &Subspace,
    samples: usize,
    seed: u64,
) -> Result<ProductCheck, NormError> {
    if s1.ambient_dim() != space.dim() || s2.ambient_dim() != space.dim() {
        return Err(NormError::DimensionMismatch { expected: space.dim(), found: s1.ambient_dim() });
    }
    Splitting::new(s1, s2)?;
    let mut pairs: Vec<(DVector<f64>, DVector<f64>)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let c1 = gaussian(&mut rng, s1.dim());
        let c2 = gaussian(&mut rng, s2.dim());
        pairs.push((s1.embed(&c1), s2.embed(&c2)));
    }
    let v1s = critical_directions(space, s1);
    let v2s = critical_directions(space, s2);
    for a in &v1s {
        for b in &v2s {
            for t in [0.5, 1.0, 2.0] {
                pairs.push((a.clone(), b * t));
            }
        }
    }
    let mut worst = 0.0;
    let mut worst_pair = None;
    for (v1, v2) in &pairs {
        let n1 = space.eval(v1);
        let n2 = space.eval(v2);
        let denom = n1 * n1 + n2 * n2;
        if denom == 0.0 {
            continue;
        }
        let n = space.eval(&(v1 + v2));
        let r = (n * n - denom).abs() / denom;
        if r > worst || worst_pair.is_none() {
            worst = r;
            worst_pair = Some((v1.iter().cloned().collect(), v2.iter().cloned().collect()));
        }
    }
    Ok(ProductCheck { holds: worst <= PRODUCT_TOL, worst_residual: worst, worst_pair, pairs_checked: pairs.len() })
}

/// All splittings of `ℝᵈ` into two nonempty coordinate subspaces (up to
/// order) that are isometric product decompositions of `space`.
pub fn coordinate_decompositions(space: &NormedSpace, samples: usize, seed: u64) -> Vec<(Subspace, Subspace)> {
    let d = space.dim();
    let mut out = Vec::new();
    if d < 2 {
        return out;
    }
    for mask in 1..(1usize << (d - 1)) {
        let first: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
        let second: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 0).collect();
        let s1 = Subspace::coordinate(d, &first);
        let s2 = Subspace::coordinate(d, &second);
        if is_product_decomposition(space, &s1, &s2, samples, seed).is_ok_and(|c| c.holds) {
            out.push((s1, s2));
        }
    }
    out
}

/// JSON description of a norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum NormSpec {
    PolyhedralVertices { vertices: Vec<Vec<f64>> },
    PolyhedralFacets { functionals: Vec<Vec<f64>> },
    PNorm { p: Exponent, dim: usize },
    Gram { matrix: Vec<Vec<f64>> },
    Product { components: Vec<NormSpec>, bases: Vec<Vec<Vec<f64>>> },
    /// `‖v‖ = ‖map · v‖_inner`; `map` is row-major.
    Linear { inner: Box<NormSpec>, map: Vec<Vec<f64>> },
}

/// A `p` exponent, written as a number or as `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(InfName),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfName {
    Inf,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Named(_) => f64::INFINITY,
        }
    }

    pub fn from_value(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Named(InfName::Inf)
        } else {
            Exponent::Finite(p)
        }
    }
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, NormError> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    if rows.iter().any(|x| x.len() != c) {
        return Err(NormError::DimensionMismatch { expected: c, found: rows.iter().map(|x| x.len()).find(|&l| l != c).unwrap_or(0) });
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

fn to_vectors(rows: &[Vec<f64>]) -> Vec<DVector<f64>> {
    rows.iter().map(|r| DVector::from_column_slice(r)).collect()
}

fn to_rows(vs: &[DVector<f64>]) -> Vec<Vec<f64>> {
    vs.iter().map(|v| v.iter().cloned().collect()).collect()
}

impl TryFrom<&NormSpec> for NormedSpace {
    type Error = NormError;

    fn try_from(spec: &NormSpec) -> Result<Self, NormError> {
        match spec {
            NormSpec::PolyhedralVertices { vertices } => NormedSpace::vertices(to_vectors(vertices)),
            NormSpec::PolyhedralFacets { functionals } => NormedSpace::facets(to_vectors(functionals)),
            NormSpec::PNorm { p, dim } => NormedSpace::p_norm(p.value(), *dim),
            NormSpec::Gram { matrix } => NormedSpace::gram(rows_to_matrix(matrix)?),
            NormSpec::Product { components, bases } => {
                let comps = components.iter().map(NormedSpace::try_from).collect::<Result<Vec<_>, _>>()?;
                let dim: usize = comps.iter().map(|c| c.dim()).sum();
                let mut mats = Vec::with_capacity(bases.len());
                for b in bases {
                    let cols = to_vectors(b);
                    if cols.iter().any(|c| c.len() != dim) {
                        return Err(NormError::BadBases);
                    }
                    mats.push(crate::linalg::columns_to_matrix(dim, &cols));
                }
                NormedSpace::product(comps, mats)
            }
            NormSpec::Linear { inner, map } => NormedSpace::linear(NormedSpace::try_from(inner.as_ref())?, rows_to_matrix(map)?),
        }
    }
}

impl From<&NormedSpace> for NormSpec {
    fn from(space: &NormedSpace) -> Self {
        match &space.form {
            NormForm::Vertices(vs) => NormSpec::PolyhedralVertices { vertices: to_rows(vs) },
            NormForm::Facets(fs) => NormSpec::PolyhedralFacets { functionals: to_rows(fs) },
            NormForm::PNorm(p) => NormSpec::PNorm { p: Exponent::from_value(*p), dim: space.dim },
            NormForm::Gram(g) => NormSpec::Gram { matrix: matrix_to_rows(g) },
            NormForm::Product { components, bases, .. } => NormSpec::Product {
                components: components.iter().map(NormSpec::from).collect(),
                bases: bases
                    .iter()
                    .map(|b| (0..b.ncols()).map(|j| b.column(j).iter().cloned().collect()).collect())
                    .collect(),
            },
            NormForm::Linear { inner, map } => {
                NormSpec::Linear { inner: Box::new(NormSpec::from(inner.as_ref())), map: matrix_to_rows(map) }
            }
        }
    }
}

impl Serialize for NormedSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NormSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormedSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = NormSpec::deserialize(d)?;
        NormedSpace::try_from(&spec).map_err(serde::de::Error::custom)
    }
}
