//! Parallelogram defect and the rigidity of transversal product
//! decompositions.
//!
//! For a normed space `C` the map `D(x, y) = (x + y, x − y)/√2` on `C²`
//! (with the product norm `‖(x, y)‖² = ‖x‖² + ‖y‖²`) has norm `M(C) ∈ [1, √2]`,
//! and `M(C) = 1` exactly when `C` is Euclidean. Two product decompositions
//! `C = A × Ā = B × B̄` in general position force `M(C) = 1`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{hstack, pseudo_inverse, rank, smallest_right_singular_vector, LinalgError, Splitting, Subspace};
use crate::loewner::{boundary_deviation, max_inscribed_ellipsoid, LoewnerError};
use crate::norm::{gaussian, is_product_decomposition, NormError, NormForm, NormedSpace, ProductCheck};

/// Both certificates of Euclidean-ness must be within this.
pub const EUCLIDEAN_TOL: f64 = 1e-6;
/// Slack for calling a pair ε-extremal.
pub const EXTREMAL_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum RigidityError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Loewner(#[from] LoewnerError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("decompositions are not transversal: {}", .0.join(", "))]
    NotTransversal(Vec<String>),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// `√((‖x+y‖² + ‖x−y‖²) / (2(‖x‖² + ‖y‖²)))`, or `None` at the origin.
pub fn defect_ratio(space: &NormedSpace, x: &DVector<f64>, y: &DVector<f64>) -> Option<f64> {
    let nx = space.eval(x);
    let ny = space.eval(y);
    let den = 2.0 * (nx * nx + ny * ny);
    if den == 0.0 {
        return None;
    }
    let s = space.eval(&(x + y));
    let d = space.eval(&(x - y));
    Some(((s * s + d * d) / den).sqrt())
}

#[derive(Debug, Clone, Copy)]
pub struct DefectOptions {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for DefectOptions {
    fn default() -> Self {
        Self { starts: 512, iterations: 300, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefectReport {
    pub m_value: f64,
    pub extremal_pair: (Vec<f64>, Vec<f64>),
    /// The value is an evaluated ratio, hence a lower bound for `M(C)`.
    pub certified_lower: bool,
    /// `M(C)` itself: the upper bound `√2` is attained, or the norm is an
    /// inner product.
    pub certified_global: bool,
    pub starts: usize,
    pub vertex_pairs: usize,
    pub log: Vec<String>,
}

fn split_pair(z: &DVector<f64>, d: usize) -> (DVector<f64>, DVector<f64>) {
    (z.rows(0, d).into_owned(), z.rows(d, d).into_owned())
}

fn climb(space: &NormedSpace, start: DVector<f64>, iterations: usize, rng: &mut ChaCha8Rng) -> (f64, DVector<f64>) {
    let d = space.dim();
    let ratio = |z: &DVector<f64>| {
        let (x, y) = split_pair(z, d);
        defect_ratio(space, &x, &y).unwrap_or(0.0)
    };
    let mut z = start.normalize();
    let mut val = ratio(&z);
    let mut h = 0.5;
    for _ in 0..iterations {
        let cand = (&z + gaussian(rng, 2 * d) * h).normalize();
        let cv = ratio(&cand);
        if cv > val {
            z = cand;
            val = cv;
            h = (h * 1.5).min(1.0);
        } else {
            h *= 0.7;
            if h < 1e-10 {
                break;
            }
        }
    }
    (val, z)
}

fn better(a: &(f64, DVector<f64>), b: &(f64, DVector<f64>)) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    a.1.iter().partial_cmp(b.1.iter()) == Some(std::cmp::Ordering::Less)
}

/// Estimates `M(C)` from below by multi-start ascent plus, for polyhedral
/// norms, every pair of unit-ball vertices.
pub fn defect(space: &NormedSpace, opts: &DefectOptions) -> DefectReport {
    let d = space.dim();
    let mut log = Vec::new();
    let e1 = DVector::from_fn(2 * d, |i, _| if i == 0 { 1.0 } else { 0.0 });
    let mut best = (1.0, e1);

    let climbed: Vec<(f64, DVector<f64>)> = (0..opts.starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
            let start = gaussian(&mut rng, 2 * d);
            climb(space, start, opts.iterations, &mut rng)
        })
        .collect();
    for c in climbed {
        if better(&c, &best) {
            best = c;
        }
    }
    log.push(format!("ascent from {} starts: {:.12}", opts.starts, best.0));

    let mut vertex_pairs = 0;
    if space.is_polyhedral() {
        if let Some(mut vs) = space.ball_vertices() {
            vs.truncate(256);
            for x in &vs {
                for y in &vs {
                    vertex_pairs += 1;
                    if let Some(r) = defect_ratio(space, x, y) {
                        let mut z = DVector::zeros(2 * d);
                        z.rows_mut(0, d).copy_from(x);
                        z.rows_mut(d, d).copy_from(y);
                        let cand = (r, z);
                        if better(&cand, &best) {
                            best = cand;
                        }
                    }
                }
            }
            log.push(format!("{vertex_pairs} vertex pairs: {:.12}", best.0));
        }
    }
    let (x, y) = split_pair(&best.1, d);
    let m_value = defect_ratio(space, &x, &y).unwrap_or(1.0);
    let attained = m_value >= std::f64::consts::SQRT_2 - 1e-12;
    let inner = matches!(space.form(), NormForm::Gram(_));
    if attained {
        log.push("upper bound √2 attained".into());
    }
    if inner {
        log.push("inner-product norm: parallelogram law holds identically".into());
    }
    DefectReport {
        m_value,
        extremal_pair: (x.iter().copied().collect(), y.iter().copied().collect()),
        certified_lower: true,
        certified_global: attained || inner,
        starts: opts.starts,
        vertex_pairs,
        log,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectangularityReport {
    pub pair_ratio: f64,
    /// Ratio of the component in `s1²`, `None` when it vanishes.
    pub first_ratio: Option<f64>,
    pub second_ratio: Option<f64>,
    pub pass: bool,
}

/// Splits an extremal pair along `C² = s1² × s2²` and checks that each
/// nonzero component is extremal too.
pub fn extremal_rectangularity(
    space: &NormedSpace,
    s1: &Subspace,
    s2: &Subspace,
    pair: (&DVector<f64>, &DVector<f64>),
    m_value: f64,
) -> Result<RectangularityReport, RigidityError> {
    let (x, y) = pair;
    let pair_ratio = defect_ratio(space, x, y).ok_or_else(|| RigidityError::Precondition("zero pair".into()))?;
    if pair_ratio < m_value - EXTREMAL_TOL {
        return Err(RigidityError::Precondition(format!("pair ratio {pair_ratio} is below M = {m_value}")));
    }
    let check = is_product_decomposition(space, s1, s2, 256, 0)?;
    if !check.holds {
        return Err(RigidityError::Precondition(format!(
            "not a product decomposition (residual {:.3e})",
            check.worst_residual
        )));
    }
    let sp = Splitting::new(s1, s2)?;
    let scale = space.eval(x).max(space.eval(y));
    let part = |px: DVector<f64>, py: DVector<f64>| {
        if space.eval(&px).max(space.eval(&py)) <= 1e-12 * scale {
            None
        } else {
            defect_ratio(space, &px, &py)
        }
    };
    let first_ratio = part(sp.project_first(x), sp.project_first(y));
    let second_ratio = part(sp.project_second(x), sp.project_second(y));
    let ok = |r: Option<f64>| r.is_none_or(|r| r >= m_value - EXTREMAL_TOL);
    Ok(RectangularityReport { pair_ratio, first_ratio, second_ratio, pass: ok(first_ratio) && ok(second_ratio) })
}

/// Two decompositions `C = A ⊕ Ā = B ⊕ B̄` of one normed space.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    pub space: NormedSpace,
    pub a: Subspace,
    pub abar: Subspace,
    pub b: Subspace,
    pub bbar: Subspace,
    split_a: Splitting,
    split_b: Splitting,
}

impl ProjectionPair {
    pub fn new(space: NormedSpace, a: Subspace, abar: Subspace, b: Subspace, bbar: Subspace) -> Result<Self, RigidityError> {
        for s in [&a, &abar, &b, &bbar] {
            if s.ambient_dim() != space.dim() {
                return Err(NormError::DimensionMismatch { expected: space.dim(), found: s.ambient_dim() }.into());
            }
        }
        let split_a = Splitting::new(&a, &abar)?;
        let split_b = Splitting::new(&b, &bbar)?;
        Ok(Self { space, a, abar, b, bbar, split_a, split_b })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `P^A`, the projection onto `A` along `Ā`.
    pub fn p_a(&self) -> DMatrix<f64> {
        self.split_a.projector_first()
    }

    pub fn p_abar(&self) -> DMatrix<f64> {
        self.split_a.projector_second()
    }

    pub fn p_b(&self) -> DMatrix<f64> {
        self.split_b.projector_first()
    }

    pub fn p_bbar(&self) -> DMatrix<f64> {
        self.split_b.projector_second()
    }

    /// `Q = P^A ∘ P^B` restricted to `A`, in the basis of `A`.
    pub fn q_matrix(&self) -> DMatrix<f64> {
        let k = self.a.dim();
        let q = self.p_a() * self.p_b();
        DMatrix::from_fn(k, k, |i, j| self.split_a.coords(&(&q * self.a.vector(j))).0[i])
    }

    /// Nontrivial intersections among `A ∩ B`, `A ∩ B̄`, `Ā ∩ B`, `Ā ∩ B̄`.
    pub fn transversality_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (s, sn) in [(&self.a, "A"), (&self.abar, "Ā")] {
            for (t, tn) in [(&self.b, "B"), (&self.bbar, "B̄")] {
                let r = rank(&hstack(s.basis(), t.basis()));
                let meet = s.dim() + t.dim() - r;
                if meet > 0 {
                    out.push(format!("dim({sn} ∩ {tn}) = {meet}"));
                }
            }
        }
        out
    }

    pub fn is_transversal(&self) -> bool {
        self.transversality_violations().is_empty()
    }

    pub fn product_checks(&self, samples: usize, seed: u64) -> Result<(ProductCheck, ProductCheck), RigidityError> {
        Ok((
            is_product_decomposition(&self.space, &self.a, &self.abar, samples, seed)?,
            is_product_decomposition(&self.space, &self.b, &self.bbar, samples, seed)?,
        ))
    }

    fn require_transversal(&self) -> Result<(), RigidityError> {
        let v = self.transversality_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(RigidityError::NotTransversal(v))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenReport {
    /// Largest real eigenvalue of `Q`.
    pub lambda: f64,
    /// `max ‖P^B x‖² / ‖x‖²` over `x ∈ A`.
    pub lambda_variational: f64,
    /// Unit eigenvector in `A`, ambient coordinates.
    pub vector: Vec<f64>,
    /// `‖Q v − λ v‖`.
    pub residual: f64,
    /// `|‖P^B v‖ − √λ‖v‖|`.
    pub norm_residual: f64,
    pub eigenspace_dim: usize,
    pub pass: bool,
}

fn variational_max(pp: &ProjectionPair, seed: u64) -> f64 {
    let pb = pp.p_b();
    let basis = pp.a.basis().clone();
    if let NormForm::Gram(g) = pp.space.form() {
        // Rayleigh quotient of two quadratic forms on A.
        let den = basis.transpose() * g * &basis;
        let num = basis.transpose() * pb.transpose() * g * &pb * &basis;
        let l = den.cholesky().expect("restriction of a positive form").l();
        let li = l.clone().try_inverse().expect("invertible factor");
        let sym = &li * num * li.transpose();
        let sym = (&sym + sym.transpose()) * 0.5;
        return sym.symmetric_eigenvalues().max();
    }
    let k = basis.ncols();
    let f = |c: &DVector<f64>| {
        let x = &basis * c;
        let n = pp.space.eval(&x);
        if n == 0.0 {
            0.0
        } else {
            (pp.space.eval(&(&pb * x)) / n).powi(2)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..64 {
        let mut c = gaussian(&mut rng, k).normalize();
        let mut val = f(&c);
        let mut h = 0.5;
        for _ in 0..400 {
            let cand = (&c + gaussian(&mut rng, k) * h).normalize();
            let cv = f(&cand);
            if cv > val {
                c = cand;
                val = cv;
                h = (h * 1.5).min(1.0);
            } else {
                h *= 0.7;
                if h < 1e-12 {
                    break;
                }
            }
        }
        best = best.max(val);
    }
    best
}

/// Eigenvector of `Q = P^A ∘ P^B` on `A` from the variational characterization,
/// cross-checked against the eigenvalues of `Q`.
pub fn composed_projection_eigen(pp: &ProjectionPair, seed: u64) -> Result<EigenReport, RigidityError> {
    pp.require_transversal()?;
    let q = pp.q_matrix();
    let k = q.nrows();
    let eig = q.clone().complex_eigenvalues();
    let reals: Vec<f64> = eig.iter().filter(|z| z.im.abs() <= 1e-9 * z.re.abs().max(1.0)).map(|z| z.re).collect();
    let lambda = reals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lambda.is_finite() {
        return Err(RigidityError::Precondition("Q has no real eigenvalue".into()));
    }
    let eigenspace_dim = reals.iter().filter(|&&r| (r - lambda).abs() <= 1e-8).count();
    let shifted = &q - DMatrix::identity(k, k) * lambda;
    let coords = smallest_right_singular_vector(&shifted);
    let v = &pp.a.basis().clone() * coords;
    let v = &v / pp.space.eval(&v);
    let qv = pp.p_a() * pp.p_b() * &v;
    let residual = pp.space.eval(&(qv - &v * lambda));
    let norm_residual = (pp.space.eval(&(pp.p_b() * &v)) - lambda.max(0.0).sqrt()).abs();
    let lambda_variational = variational_max(pp, seed);
    let agree = if matches!(pp.space.form(), NormForm::Gram(_)) { 1e-8 } else { EXTREMAL_TOL };
    let pass = residual <= 1e-8
        && norm_residual <= 1e-8
        && lambda > 0.0
        && lambda < 1.0
        && (lambda_variational - lambda).abs() <= agree;
    Ok(EigenReport {
        lambda,
        lambda_variational,
        vector: v.iter().copied().collect(),
        residual,
        norm_residual,
        eigenspace_dim,
        pass,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniqueReport {
    pub lambda: f64,
    pub s: f64,
    /// `max |Q − λ·Id|` entrywise.
    pub q_error: f64,
    /// `max |‖I(a)‖ − ‖a‖| / ‖a‖` over the samples.
    pub isometry_residual: f64,
    /// Relative residual of `‖x + sI(x)‖² + ‖I(y) − sy‖² = ‖(x − sy) + I(sx + y)‖²`.
    pub ambient_residual: f64,
    /// Relative residual of `(1+s²)(‖x‖² + ‖y‖²) = ‖x − sy‖² + ‖sx + y‖²` on `A`.
    pub reduced_residual: f64,
    pub worst_pair: (Vec<f64>, Vec<f64>),
    pub samples: usize,
    pub identity_holds: bool,
    pub loewner_deviation: f64,
    pub euclidean: bool,
}

/// With `Q = λ·Id` on `A`, tests the generalized parallelogram identity and
/// certifies Euclidean-ness through the Löwner ellipsoid.
pub fn check_lemma_unique(pp: &ProjectionPair, lambda: f64, samples: usize, seed: u64) -> Result<UniqueReport, RigidityError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(RigidityError::Precondition(format!("λ = {lambda} is outside (0, 1)")));
    }
    let q = pp.q_matrix();
    let k = q.nrows();
    let q_error = (&q - DMatrix::identity(k, k) * lambda).amax();
    if q_error > IDENTITY_TOL {
        return Err(RigidityError::Precondition(format!("Q differs from λ·Id by {q_error:.3e}")));
    }
    let s = ((1.0 - lambda) / lambda).sqrt();
    let iso = pp.p_abar() * pp.p_b() / (lambda * (1.0 - lambda)).sqrt();
    let nrm = |v: &DVector<f64>| pp.space.eval(v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut isometry_residual: f64 = 0.0;
    let mut ambient_residual: f64 = 0.0;
    let mut reduced_residual: f64 = 0.0;
    let mut worst = (0.0, DVector::zeros(pp.dim()), DVector::zeros(pp.dim()));
    for _ in 0..samples {
        let x = pp.a.embed(&gaussian(&mut rng, k));
        let y = pp.a.embed(&gaussian(&mut rng, k));
        let (nx, ny) = (nrm(&x), nrm(&y));
        isometry_residual = isometry_residual.max((nrm(&(&iso * &x)) - nx).abs() / nx);
        let lhs = nrm(&(&x + &iso * &x * s)).powi(2) + nrm(&(&iso * &y - &y * s)).powi(2);
        let rhs = nrm(&(&x - &y * s + &iso * (&x * s + &y))).powi(2);
        let amb = (lhs - rhs).abs() / lhs;
        let red_l = (1.0 + s * s) * (nx * nx + ny * ny);
        let red_r = nrm(&(&x - &y * s)).powi(2) + nrm(&(&x * s + &y)).powi(2);
        let red = (red_l - red_r).abs() / red_l;
        ambient_residual = ambient_residual.max(amb);
        reduced_residual = reduced_residual.max(red);
        if amb.max(red) > worst.0 {
            worst = (amb.max(red), x, y);
        }
    }
    let identity_holds = ambient_residual <= IDENTITY_TOL && reduced_residual <= IDENTITY_TOL && isometry_residual <= IDENTITY_TOL;
    let e = max_inscribed_ellipsoid(&pp.space)?.ellipsoid;
    let loewner_deviation = boundary_deviation(&pp.space, &e, 1024, seed);
    Ok(UniqueReport {
        lambda,
        s,
        q_error,
        isometry_residual,
        ambient_residual,
        reduced_residual,
        worst_pair: (worst.1.iter().copied().collect(), worst.2.iter().copied().collect()),
        samples,
        identity_holds,
        loewner_deviation,
        euclidean: identity_holds && loewner_deviation <= EUCLIDEAN_TOL,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct StrikeOptions {
    /// Verify that both pairs are product decompositions before anything else.
    pub require_product: bool,
    pub defect: DefectOptions,
}

impl Default for StrikeOptions {
    fn default() -> Self {
        Self { require_product: true, defect: DefectOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StrikeVerdict {
    EuclideanConfirmed { m_value: f64, loewner_deviation: f64 },
    /// The chain reached a state that transversal product input cannot
    /// produce; the data locates where it broke.
    Inconsistent {
        m_value: f64,
        loewner_deviation: f64,
        extremal_pair: (Vec<f64>, Vec<f64>),
        lambda: Option<f64>,
        /// `span(P^B a, P^B̄ a)` for the eigenvector `a` of `Q`.
        plane: Option<Subspace>,
        /// `M` of that plane, which is Euclidean for genuine input.
        plane_m_value: Option<f64>,
        reasons: Vec<String>,
    },
}

/// Two transversal product decompositions of `C` imply `C` is Euclidean.
pub fn check_strike(pp: &ProjectionPair, opts: &StrikeOptions) -> Result<StrikeVerdict, RigidityError> {
    pp.require_transversal()?;
    if opts.require_product {
        let (ca, cb) = pp.product_checks(512, opts.defect.seed)?;
        for (c, name) in [(ca, "A × Ā"), (cb, "B × B̄")] {
            if !c.holds {
                return Err(RigidityError::Precondition(format!(
                    "{name} is not a product decomposition (residual {:.3e})",
                    c.worst_residual
                )));
            }
        }
    }
    let rep = defect(&pp.space, &opts.defect);
    let e = max_inscribed_ellipsoid(&pp.space)?.ellipsoid;
    let loewner_deviation = boundary_deviation(&pp.space, &e, 1024, opts.defect.seed);
    if rep.m_value <= 1.0 + EUCLIDEAN_TOL && loewner_deviation <= EUCLIDEAN_TOL {
        return Ok(StrikeVerdict::EuclideanConfirmed { m_value: rep.m_value, loewner_deviation });
    }
    let mut reasons = Vec::new();
    if rep.m_value > 1.0 + EUCLIDEAN_TOL {
        reasons.push(format!("M(C) = {:.9} > 1", rep.m_value));
    }
    if loewner_deviation > EUCLIDEAN_TOL {
        reasons.push(format!("Löwner boundary deviation {loewner_deviation:.3e}"));
    }
    let (mut lambda, mut plane, mut plane_m_value) = (None, None, None);
    match composed_projection_eigen(pp, opts.defect.seed) {
        Ok(eig) => {
            lambda = Some(eig.lambda);
            let a = DVector::from_vec(eig.vector.clone());
            let f = Subspace::span(pp.dim(), &[pp.p_b() * &a, pp.p_bbar() * &a]);
            if f.dim() == 2 {
                let restricted = pp.space.restrict(&f)?;
                let m = defect(&restricted, &DefectOptions { starts: 64, ..opts.defect }).m_value;
                plane_m_value = Some(m);
                if m > 1.0 + EUCLIDEAN_TOL {
                    reasons.push(format!("eigenplane is not Euclidean (M = {m:.9})"));
                }
            } else {
                reasons.push(format!("eigenplane has dimension {}", f.dim()));
            }
            plane = Some(f);
            if !eig.pass {
                reasons.push("eigenvector lemma fails".into());
            }
        }
        Err(e) => reasons.push(format!("eigenvector step failed: {e}")),
    }
    Ok(StrikeVerdict::Inconsistent {
        m_value: rep.m_value,
        loewner_deviation,
        extremal_pair: rep.extremal_pair,
        lambda,
        plane,
        plane_m_value,
        reasons,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MainInterReport {
    pub f: Subspace,
    pub f_dim: usize,
    pub b_dim: usize,
    /// Complement of `F` inside `B` making `B = F × G`.
    pub complement: Option<Subspace>,
    pub is_factor: bool,
    pub worst_residual: f64,
    /// `B ∩ A = B ∩ Ā = {0}`: then `B` is a linear space, which holds for
    /// every subspace.
    pub unbound_configuration: bool,
    pub unbound_pass: bool,
}

fn coords_in(s: &Subspace, t: &Subspace) -> Result<Subspace, RigidityError> {
    Ok(Subspace::span_of(&(pseudo_inverse(s.basis()) * t.basis())))
}

/// `F = A ∩ B` is a direct factor of `B`.
pub fn check_maininter_unbound(pp: &ProjectionPair, samples: usize, seed: u64) -> Result<MainInterReport, RigidityError> {
    let (ca, cb) = pp.product_checks(samples, seed)?;
    if !ca.holds || !cb.holds {
        return Err(RigidityError::Precondition("both pairs must be product decompositions".into()));
    }
    let f = pp.a.intersection(&pp.b);
    let b = &pp.b;
    let unbound_configuration = b.intersection(&pp.a).is_trivial() && b.intersection(&pp.abar).is_trivial();
    let mut report = MainInterReport {
        f_dim: f.dim(),
        f: f.clone(),
        b_dim: b.dim(),
        complement: None,
        is_factor: false,
        worst_residual: 0.0,
        unbound_configuration,
        unbound_pass: unbound_configuration,
    };
    if f.is_trivial() || f.dim() == b.dim() {
        report.complement = Some(if f.is_trivial() { b.clone() } else { Subspace::zero(pp.dim()) });
        report.is_factor = true;
        return Ok(report);
    }
    let mut candidates = Vec::new();
    let meet = b.intersection(&pp.abar);
    if meet.dim() + f.dim() == b.dim() {
        candidates.push(meet);
    }
    if let Ok(e) = max_inscribed_ellipsoid(&pp.space) {
        let orth = b.intersection(&f.complement(&e.ellipsoid.shape));
        if orth.dim() + f.dim() == b.dim() {
            candidates.push(orth);
        }
    }
    let restricted = pp.space.restrict(b)?;
    let fc = coords_in(b, &f)?;
    report.worst_residual = f64::INFINITY;
    for g in candidates {
        let gc = coords_in(b, &g)?;
        if rank(&hstack(fc.basis(), gc.basis())) != b.dim() {
            continue;
        }
        let c = is_product_decomposition(&restricted, &fc, &gc, samples, seed)?;
        if c.worst_residual < report.worst_residual {
            report.worst_residual = c.worst_residual;
        }
        if c.holds {
            report.complement = Some(g);
            report.is_factor = true;
            break;
        }
    }
    Ok(report)
}
