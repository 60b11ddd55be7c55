//! Maximal-volume ellipsoid inscribed in a symmetric unit ball, the induced
//! inner product, and the orthogonality check for product norms.
//!
//! With `E = {Bu : ‖u‖₂ ≤ 1}` and `P = B²`, containment in the ball cut out by
//! functionals `aᵢ` reads `aᵢᵀ P aᵢ ≤ 1`, so the solver maximizes `log det P`
//! under these constraints by a log-barrier Newton method. Balls without a
//! finite facet list are approximated from outside by support functionals
//! added at the worst boundary point of the current ellipsoid.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{rank, columns_to_matrix, Subspace};
use crate::norm::{gaussian, is_product_decomposition, NormError, NormForm, NormedSpace};

/// Target `m·μ` at the end of the barrier path.
const FINAL_GAP: f64 = 1e-12;
const MAX_NEWTON: usize = 20_000;
const MAX_CUT_ROUNDS: usize = 400;
const CUT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone)]
pub enum LoewnerError {
    #[error("unit ball has empty interior")]
    Degenerate,
    #[error("solver did not converge: {reason}")]
    NoConvergence { reason: String, best: Box<Ellipsoid> },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// `{v : vᵀ M v ≤ 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    #[serde(with = "matrix_rows")]
    pub shape: DMatrix<f64>,
}

mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("shape matrix must be square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

fn sym_sqrt_inv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = m.clone().symmetric_eigen();
    let d = e.eigenvalues.map(|x| 1.0 / x.max(1e-300).sqrt());
    &e.eigenvectors * DMatrix::from_diagonal(&d) * e.eigenvectors.transpose()
}

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

impl Ellipsoid {
    pub fn new(shape: DMatrix<f64>) -> Option<Self> {
        let sym = (&shape - shape.transpose()).amax() <= 1e-10 * shape.amax().max(1.0);
        (sym && shape.clone().cholesky().is_some()).then_some(Self { shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.nrows()
    }

    /// `B = M^{-1/2}`, so that `E = B(unit ball)`.
    pub fn generator(&self) -> DMatrix<f64> {
        sym_sqrt_inv(&self.shape)
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) / self.shape.determinant().sqrt()
    }

    /// `‖v‖_E = √(vᵀMv)`.
    pub fn gauge(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.shape * v)).max(0.0).sqrt()
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.shape * v))
    }

    /// Shape of `T(E)`.
    pub fn push_forward(&self, t: &DMatrix<f64>) -> Option<Self> {
        let inv = t.clone().try_inverse()?;
        let m = inv.transpose() * &self.shape * inv;
        Self::new((&m + m.transpose()) * 0.5)
    }

    /// `E ∩ s` in the coordinates of `s`'s basis.
    pub fn restrict(&self, s: &Subspace) -> Self {
        let m = s.basis().transpose() * &self.shape * s.basis();
        Self { shape: (&m + m.transpose()) * 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoewnerReport {
    pub ellipsoid: Ellipsoid,
    pub volume: f64,
    /// `−log det W + Σwᵢ − d − log det P` for the dual weights `wᵢ`.
    pub dual_gap: f64,
    /// `exp(gap/2) − 1`: relative volume shortfall bound.
    pub relative_volume_gap: f64,
    /// Largest `‖v‖` found on the boundary of `E`.
    pub max_boundary_norm: f64,
    pub constraints: usize,
    pub newton_steps: usize,
    pub log: Vec<String>,
}

/// Coordinates of a symmetric matrix: `(i, j)` with `i ≤ j`.
fn sym_index(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            out.push((i, j));
        }
    }
    out
}

struct Barrier<'a> {
    d: usize,
    idx: Vec<(usize, usize)>,
    a: &'a [DVector<f64>],
    /// `φᵢ` with `aᵢᵀ P aᵢ = ⟨φᵢ, x⟩`.
    feats: Vec<DVector<f64>>,
}

impl<'a> Barrier<'a> {
    fn new(d: usize, a: &'a [DVector<f64>]) -> Self {
        let idx = sym_index(d);
        let feats = a
            .iter()
            .map(|ai| DVector::from_iterator(idx.len(), idx.iter().map(|&(i, j)| if i == j { ai[i] * ai[i] } else { 2.0 * ai[i] * ai[j] })))
            .collect();
        Self { d, idx, a, feats }
    }

    fn to_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.d, self.d);
        for (k, &(i, j)) in self.idx.iter().enumerate() {
            p[(i, j)] = x[k];
            p[(j, i)] = x[k];
        }
        p
    }

    fn to_vector(&self, p: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.idx.len(), self.idx.iter().map(|&(i, j)| p[(i, j)]))
    }

    /// `−log det P − μ Σ log(1 − sᵢ)`, or `None` outside the domain.
    fn value(&self, x: &DVector<f64>, mu: f64) -> Option<f64> {
        let chol = self.to_matrix(x).cholesky()?;
        let logdet: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let mut f = -logdet;
        for phi in &self.feats {
            let s = phi.dot(x);
            if s >= 1.0 {
                return None;
            }
            f -= mu * (1.0 - s).ln();
        }
        Some(f)
    }

    fn newton_system(&self, x: &DVector<f64>, mu: f64) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.idx.len();
        let p = self.to_matrix(x);
        let q = p.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(self.d, self.d));
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        // −log det part.
        let mut qeq = Vec::with_capacity(n);
        for &(i, j) in &self.idx {
            let mut e = DMatrix::zeros(self.d, self.d);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            qeq.push(&q * e * &q);
        }
        for (k, &(i, j)) in self.idx.iter().enumerate() {
            g[k] = -if i == j { q[(i, i)] } else { 2.0 * q[(i, j)] };
            for (l, &(a, b)) in self.idx.iter().enumerate() {
                h[(k, l)] = if a == b { qeq[k][(a, a)] } else { 2.0 * qeq[k][(a, b)] };
            }
        }
        for phi in &self.feats {
            let slack = 1.0 - phi.dot(x);
            g += phi * (mu / slack);
            h += phi * phi.transpose() * (mu / (slack * slack));
        }
        (g, h)
    }

    /// Newton centering for fixed `μ`; returns the number of steps.
    fn center(&self, x: &mut DVector<f64>, mu: f64, budget: usize) -> Result<usize, String> {
        let mut fx = self.value(x, mu).ok_or("iterate left the domain")?;
        for step in 0..budget {
            let (g, h) = self.newton_system(x, mu);
            let dx = match h.clone().cholesky() {
                Some(c) => -c.solve(&g),
                None => {
                    let ridge = h + DMatrix::identity(g.len(), g.len()) * 1e-12;
                    -ridge.lu().solve(&g).ok_or("singular Newton system")?
                }
            };
            let decrement = -g.dot(&dx);
            if decrement < 1e-20 {
                return Ok(step);
            }
            let mut t = 1.0;
            loop {
                let trial = &*x + &dx * t;
                if let Some(ft) = self.value(&trial, mu) {
                    if ft <= fx - 0.25 * t * decrement {
                        *x = trial;
                        fx = ft;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-18 {
                    return Ok(step);
                }
            }
            if decrement < 1e-14 {
                return Ok(step + 1);
            }
        }
        Err(format!("centering did not converge in {budget} steps"))
    }

    fn dual_gap(&self, x: &DVector<f64>, mu: f64) -> f64 {
        let p = self.to_matrix(x);
        let mut w = DMatrix::zeros(self.d, self.d);
        let mut total = 0.0;
        for (ai, phi) in self.a.iter().zip(&self.feats) {
            let wi = mu / (1.0 - phi.dot(x));
            w += ai * ai.transpose() * wi;
            total += wi;
        }
        let ld = |m: &DMatrix<f64>| m.clone().cholesky().map(|c| 2.0 * c.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>());
        match (ld(&w), ld(&p)) {
            // The bound is minimized over rescalings of the weights.
            (Some(lw), Some(lp)) => {
                let d = self.d as f64;
                (-lw + d * (total / d).ln() - lp).max(0.0)
            }
            _ => f64::INFINITY,
        }
    }
}

struct Solved {
    p: DMatrix<f64>,
    gap: f64,
    steps: usize,
}

/// Maximizes `log det P` subject to `aᵢᵀPaᵢ ≤ 1`, warm-started from `start`
/// when it is strictly feasible.
fn solve_facets(d: usize, a: &[DVector<f64>], start: Option<&DMatrix<f64>>) -> Result<Solved, (String, DMatrix<f64>)> {
    let bar = Barrier::new(d, a);
    let r = a.iter().map(|ai| 1.0 / ai.norm()).fold(f64::INFINITY, f64::min);
    let init = DMatrix::identity(d, d) * (0.9 * r * r);
    let p0 = match start {
        Some(p) => {
            let smax = a.iter().map(|ai| ai.dot(&(p * ai))).fold(0.0, f64::max);
            if smax > 0.0 {
                p * (0.9 / smax.max(0.9))
            } else {
                init
            }
        }
        None => init,
    };
    let mut x = bar.to_vector(&p0);
    let m = a.len() as f64;
    let mut mu = 1.0;
    let mut steps = 0;
    // Weights from the last steps lose digits in the slacks of active
    // constraints; every earlier dual value still bounds the optimum.
    let logdet = |x: &DVector<f64>| {
        bar.to_matrix(x).cholesky().map_or(f64::NEG_INFINITY, |c| 2.0 * c.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
    };
    let mut dual_bound = f64::INFINITY;
    loop {
        steps += bar.center(&mut x, mu, MAX_NEWTON.saturating_sub(steps).max(1)).map_err(|e| (e, bar.to_matrix(&x)))?;
        dual_bound = dual_bound.min(bar.dual_gap(&x, mu) + logdet(&x));
        if m * mu <= FINAL_GAP {
            break;
        }
        mu = (mu * 0.1).max(FINAL_GAP / m);
    }
    let gap = (dual_bound - logdet(&x)).max(0.0);
    Ok(Solved { p: bar.to_matrix(&x), gap, steps })
}

/// Local maxima of `‖Bu‖` over the unit sphere from several starts; returns
/// the best point `Bu` and its norm.
fn worst_boundary_point(space: &NormedSpace, b: &DMatrix<f64>, seed: u64) -> (DVector<f64>, f64) {
    let d = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<DVector<f64>> = (0..d).map(|i| DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 })).collect();
    for i in 0..d {
        for j in i + 1..d {
            for s in [1.0, -1.0] {
                starts.push(DVector::from_fn(d, |k, _| if k == i { 1.0 } else if k == j { s } else { 0.0 }));
            }
        }
    }
    for _ in 0..(8 * d).max(16) {
        starts.push(gaussian(&mut rng, d));
    }
    let mut best = (DVector::zeros(d), 0.0);
    for u0 in starts {
        let mut u = u0.normalize();
        let mut val = space.eval(&(b * &u));
        for _ in 0..200 {
            let v = b * &u;
            let f = space.support_functional(&v).expect("dimension matches");
            let next = b.transpose() * f;
            let nn = next.norm();
            if nn == 0.0 {
                break;
            }
            let un = next / nn;
            let nv = space.eval(&(b * &un));
            if nv <= val * (1.0 + 1e-15) {
                if nv > val {
                    u = un;
                    val = nv;
                }
                break;
            }
            u = un;
            val = nv;
        }
        if val > best.1 {
            best = (b * &u, val);
        }
    }
    best
}

fn initial_cuts(space: &NormedSpace) -> Vec<DVector<f64>> {
    let d = space.dim();
    let mut cuts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x10e);
    for i in 0..d {
        let e = DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
        cuts.push(space.support_functional(&e).expect("dimension matches"));
    }
    while rank(&columns_to_matrix(d, &cuts)) < d || cuts.len() < 3 * d {
        let v = gaussian(&mut rng, d);
        cuts.push(space.support_functional(&v).expect("dimension matches"));
        if cuts.len() > 100 * d {
            break;
        }
    }
    cuts
}

/// The Löwner ellipsoid of the unit ball of `space`.
pub fn max_inscribed_ellipsoid(space: &NormedSpace) -> Result<LoewnerReport, LoewnerError> {
    let d = space.dim();
    let mut log = Vec::new();
    if let NormForm::Gram(g) = space.form() {
        let e = Ellipsoid::new(g.clone()).ok_or(LoewnerError::Degenerate)?;
        return Ok(LoewnerReport {
            volume: e.volume(),
            ellipsoid: e,
            dual_gap: 0.0,
            relative_volume_gap: 0.0,
            max_boundary_norm: 1.0,
            constraints: 0,
            newton_steps: 0,
            log: vec!["gram form: the ball is its own Löwner ellipsoid".into()],
        });
    }
    if d == 0 {
        return Err(LoewnerError::Degenerate);
    }
    let explicit = space.known_facet_functionals();
    let mut cuts = match &explicit {
        Some(fs) => {
            // Keep one of each ± pair.
            let mut kept: Vec<DVector<f64>> = Vec::new();
            for a in fs {
                if !kept.iter().any(|k| (k + a).norm() <= 1e-12 * a.norm() || (k - a).norm() <= 1e-12 * a.norm()) {
                    kept.push(a.clone());
                }
            }
            kept
        }
        None => initial_cuts(space),
    };
    if rank(&columns_to_matrix(d, &cuts)) < d {
        return Err(LoewnerError::Degenerate);
    }
    let mut steps = 0;
    let mut warm: Option<DMatrix<f64>> = None;
    for round in 0..MAX_CUT_ROUNDS {
        let solved = solve_facets(d, &cuts, warm.as_ref()).map_err(|(reason, p)| LoewnerError::NoConvergence {
            reason,
            best: Box::new(Ellipsoid { shape: p.try_inverse().unwrap_or_else(|| DMatrix::identity(d, d)) }),
        })?;
        steps += solved.steps;
        let shape = solved.p.clone().try_inverse().ok_or(LoewnerError::Degenerate)?;
        let shape = (&shape + shape.transpose()) * 0.5;
        let b = sym_sqrt_inv(&shape);
        let (v, worst) = worst_boundary_point(space, &b, round as u64);
        if explicit.is_some() || worst <= 1.0 + CUT_TOL {
            log.push(format!(
                "round {round}: {} constraints, dual gap {:.3e}, max boundary norm {worst:.12}",
                cuts.len(),
                solved.gap
            ));
            let scale = worst.max(1.0);
            let shape = shape * (scale * scale);
            let e = Ellipsoid { shape };
            return Ok(LoewnerReport {
                volume: e.volume(),
                ellipsoid: e,
                dual_gap: solved.gap,
                relative_volume_gap: (solved.gap / 2.0).exp() - 1.0 + (d as f64) * (scale - 1.0),
                max_boundary_norm: worst,
                constraints: cuts.len(),
                newton_steps: steps,
                log,
            });
        }
        if round % 10 == 0 {
            log.push(format!("round {round}: {} cuts, boundary norm {worst:.3e}", cuts.len()));
        }
        cuts.push(space.support_functional(&v).expect("dimension matches"));
        warm = Some(solved.p);
    }
    Err(LoewnerError::NoConvergence {
        reason: format!("cutting planes did not settle in {MAX_CUT_ROUNDS} rounds"),
        best: Box::new(Ellipsoid { shape: DMatrix::identity(d, d) }),
    })
}

/// The inner product of `V^e`.
pub fn euclideanization(space: &NormedSpace) -> Result<Ellipsoid, LoewnerError> {
    Ok(max_inscribed_ellipsoid(space)?.ellipsoid)
}

/// Largest norm found on the boundary of `E` by local ascent from many starts.
pub fn max_boundary_norm(space: &NormedSpace, e: &Ellipsoid, seed: u64) -> f64 {
    worst_boundary_point(space, &e.generator(), seed).1
}

/// `max |‖v‖ − 1|` over boundary points `v` of `E`: seeded samples plus the
/// local maxima of the norm on the boundary.
pub fn boundary_deviation(space: &NormedSpace, e: &Ellipsoid, samples: usize, seed: u64) -> f64 {
    let b = e.generator();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = gaussian(&mut rng, space.dim()).normalize();
        worst = worst.max((space.eval(&(&b * u)) - 1.0).abs());
    }
    let (_, top) = worst_boundary_point(space, &b, seed);
    worst.max((top - 1.0).abs())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipsReport {
    pub ellipsoid: Ellipsoid,
    /// Largest `|⟨u, w⟩_E|` over `E`-orthonormal bases of `s1` and `s2`.
    pub off_block: f64,
    /// Relative difference between `E ∩ sᵢ` and the Löwner ellipsoid of the
    /// restricted norm.
    pub restriction_error: [f64; 2],
    pub orthogonal: bool,
    pub restrictions_match: bool,
}

impl EllipsReport {
    pub fn pass(&self) -> bool {
        self.orthogonal && self.restrictions_match
    }
}

fn e_orthonormal(e: &Ellipsoid, s: &Subspace) -> DMatrix<f64> {
    let g = s.basis().transpose() * &e.shape * s.basis();
    s.basis() * sym_sqrt_inv(&((&g + g.transpose()) * 0.5))
}

/// Checks that `s1 ⊥ s2` in `V^e` (within `tol_angle`) and that `E ∩ sᵢ` is
/// the Löwner ellipsoid of the restricted norm (within `1e-5` relative).
pub fn check_lemma_ellips(space: &NormedSpace, s1: &Subspace, s2: &Subspace, tol_angle: f64) -> Result<EllipsReport, LoewnerError> {
    let check = is_product_decomposition(space, s1, s2, 512, 0)?;
    if !check.holds {
        return Err(LoewnerError::Precondition(format!(
            "not a product decomposition (residual {:.3e})",
            check.worst_residual
        )));
    }
    let e = euclideanization(space)?;
    let q1 = e_orthonormal(&e, s1);
    let q2 = e_orthonormal(&e, s2);
    let off_block = (q1.transpose() * &e.shape * q2).amax();
    let mut restriction_error = [0.0; 2];
    for (k, s) in [s1, s2].into_iter().enumerate() {
        let local = euclideanization(&space.restrict(s)?)?;
        let cut = e.restrict(s);
        restriction_error[k] = (&cut.shape - &local.shape).amax() / local.shape.amax();
    }
    Ok(EllipsReport {
        ellipsoid: e,
        off_block,
        restriction_error,
        orthogonal: off_block <= tol_angle,
        restrictions_match: restriction_error.iter().all(|&r| r <= 1e-5),
    })
}
