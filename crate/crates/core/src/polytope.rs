//! Brute-force polyhedral routines sized for desk dimensions: hull
//! membership, extreme points, edges, and facet / vertex enumeration.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{null_space, rank};
use crate::lp::{self, LpOutcome};

/// Tolerance on feasibility of hyperplane sides and point identity.
pub const GEOM_TOL: f64 = 1e-9;

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=n.saturating_sub(need) {
            if n - i < need {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn membership_system(points: &[DVector<f64>], lineality: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let m = points.len();
    let l = lineality.len();
    let mut a = DMatrix::zeros(dim + 1, m + 2 * l);
    for (j, p) in points.iter().enumerate() {
        for i in 0..dim {
            a[(i, j)] = p[i];
        }
        a[(dim, j)] = 1.0;
    }
    for (j, w) in lineality.iter().enumerate() {
        for i in 0..dim {
            a[(i, m + 2 * j)] = w[i];
            a[(i, m + 2 * j + 1)] = -w[i];
        }
    }
    a
}

/// Whether `x ∈ conv(points) + span(lineality)`, up to `GEOM_TOL` relative
/// to the scale of the data.
pub fn in_hull(x: &DVector<f64>, points: &[DVector<f64>], lineality: &[DVector<f64>]) -> bool {
    let dim = x.len();
    if points.is_empty() {
        return false;
    }
    let a = membership_system(points, lineality, dim);
    let (rows, cols) = a.shape();
    // Slacks on both sides of every equation; the optimum is the ℓ1 distance
    // from feasibility.
    let mut relaxed = DMatrix::zeros(rows, cols + 2 * rows);
    relaxed.view_mut((0, 0), (rows, cols)).copy_from(&a);
    for i in 0..rows {
        relaxed[(i, cols + 2 * i)] = 1.0;
        relaxed[(i, cols + 2 * i + 1)] = -1.0;
    }
    let mut c = vec![0.0; cols + 2 * rows];
    c[cols..].fill(1.0);
    let mut b: Vec<f64> = x.iter().cloned().collect();
    b.push(1.0);
    let scale = points.iter().map(|p| p.amax()).fold(x.amax(), f64::max).max(1.0);
    match lp::minimize(&c, &relaxed, &b) {
        LpOutcome::Optimal(s) => s.objective <= GEOM_TOL * scale,
        _ => false,
    }
}

pub fn dedup_points(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| (q - p).norm() <= GEOM_TOL * q.norm().max(1.0)) {
            out.push(p.clone());
        }
    }
    out
}

/// Indices of the points that are not convex combinations of the others
/// (modulo the lineality directions). Duplicates keep their first copy.
pub fn extreme_points(points: &[DVector<f64>], lineality: &[DVector<f64>]) -> Vec<usize> {
    let mut keep = Vec::new();
    for i in 0..points.len() {
        let dup = (0..i).any(|j| (&points[j] - &points[i]).norm() <= GEOM_TOL * points[i].norm().max(1.0));
        if dup {
            continue;
        }
        let others: Vec<DVector<f64>> = points
            .iter()
            .enumerate()
            .filter(|&(j, q)| j != i && (q - &points[i]).norm() > GEOM_TOL * points[i].norm().max(1.0))
            .map(|(_, q)| q.clone())
            .collect();
        if others.is_empty() || !in_hull(&points[i], &others, lineality) {
            keep.push(i);
        }
    }
    keep
}

/// Pairs of vertices spanning an edge of `conv(vertices) + span(lineality)`.
/// The vertices must already be extreme.
pub fn edges(vertices: &[DVector<f64>], lineality: &[DVector<f64>]) -> Vec<(usize, usize)> {
    let m = vertices.len();
    if m < 2 {
        return Vec::new();
    }
    let dim = vertices[0].len();
    let a = membership_system(vertices, lineality, dim);
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let mid = (&vertices[i] + &vertices[j]) * 0.5;
            let mut b: Vec<f64> = mid.iter().cloned().collect();
            b.push(1.0);
            let mut c = vec![0.0; a.ncols()];
            for (k, ck) in c.iter_mut().enumerate().take(m) {
                if k != i && k != j {
                    *ck = -1.0;
                }
            }
            let is_edge = match lp::minimize(&c, &a, &b) {
                LpOutcome::Optimal(s) => s.objective > -1e-9,
                _ => false,
            };
            if is_edge {
                out.push((i, j));
            }
        }
    }
    out
}

/// A closed half-space `{x : normalᵀx ≤ offset}` with unit normal.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

/// Facets of the full-dimensional polytope `conv(vertices) ⊂ ℝᵏ`.
pub fn facets(vertices: &[DVector<f64>]) -> Vec<HalfSpace> {
    let m = vertices.len();
    if m == 0 {
        return Vec::new();
    }
    let k = vertices[0].len();
    let scale = vertices.iter().map(|v| v.norm()).fold(1.0_f64, f64::max);
    let mut out: Vec<HalfSpace> = Vec::new();
    for subset in combinations(m, k) {
        let base = &vertices[subset[0]];
        let mut diff = DMatrix::zeros(k - 1, k);
        for (r, &idx) in subset[1..].iter().enumerate() {
            diff.set_row(r, &(&vertices[idx] - base).transpose());
        }
        if k > 1 && rank(&diff) < k - 1 {
            continue;
        }
        let ns = if k > 1 { null_space(&diff) } else { DMatrix::from_element(1, 1, 1.0) };
        if ns.ncols() != 1 {
            continue;
        }
        let mut normal = ns.column(0).into_owned();
        let mut offset = normal.dot(base);
        let mut above = false;
        let mut below = false;
        for v in vertices {
            let s = normal.dot(v) - offset;
            if s > GEOM_TOL * scale {
                above = true;
            } else if s < -GEOM_TOL * scale {
                below = true;
            }
        }
        if above && below {
            continue;
        }
        if above {
            normal = -normal;
            offset = -offset;
        }
        let dup = out
            .iter()
            .any(|h| (&h.normal - &normal).norm() < 1e-8 && (h.offset - offset).abs() < 1e-8 * scale);
        if !dup {
            out.push(HalfSpace { normal, offset });
        }
    }
    out
}

/// Vertices of the bounded polyhedron `{x ∈ ℝᵏ : G x ≤ h}`.
pub fn vertices_of(g: &DMatrix<f64>, h: &DVector<f64>) -> Vec<DVector<f64>> {
    let k = g.ncols();
    let m = g.nrows();
    let mut out: Vec<DVector<f64>> = Vec::new();
    if k == 0 {
        if h.iter().all(|&v| v >= -GEOM_TOL) {
            out.push(DVector::zeros(0));
        }
        return out;
    }
    let scale = h.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    for subset in combinations(m, k) {
        let mut a = DMatrix::zeros(k, k);
        let mut b = DVector::zeros(k);
        for (r, &idx) in subset.iter().enumerate() {
            a.set_row(r, &g.row(idx));
            b[r] = h[idx];
        }
        if rank(&a) < k {
            continue;
        }
        let Some(x) = a.lu().solve(&b) else { continue };
        let feasible = (0..m).all(|i| (g.row(i) * &x)[0] <= h[i] + GEOM_TOL * scale);
        if feasible && !out.iter().any(|q| (q - &x).norm() <= 1e-8 * scale) {
            out.push(x);
        }
    }
    out
}
