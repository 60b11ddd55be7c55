//! Convex bodies containing the origin, given as `conv(V) + L`: lineality
//! space, linear hull, direct-sum decompositions, and the two lemmas that
//! compare orthogonal decompositions.
//!
//! A direct sum `C = C₁ ⊕ … ⊕ C_k` of polytopes has as vertices exactly the
//! sums of vertices of the parts, and every edge of `C` is parallel to an
//! edge of some part. The hulls of the parts are therefore unions of
//! connected components of the linear matroid on edge directions, and the
//! finest decomposition is found by testing coarsenings of those components.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{columns_to_matrix, hstack, pseudo_inverse, rank, Subspace};
use crate::polytope::{edges, extreme_points, facets, in_hull, vertices_of, GEOM_TOL};

/// Largest line-free dimension for which indecomposability is certified.
pub const SEARCH_CAP: usize = 6;
const MAX_EXHAUSTIVE_COMPONENTS: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvexError {
    #[error("point of dimension {found} in a body of dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the body does not contain the origin")]
    MissingOrigin,
    #[error("the body has no points")]
    Empty,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// `conv(vertices) + lineality`, with `0` in the set.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    vertices: Vec<DVector<f64>>,
    lineality: Subspace,
}

fn project_off(l: &Subspace, v: &DVector<f64>) -> DVector<f64> {
    if l.is_trivial() {
        return v.clone();
    }
    let q = l.orthonormal();
    v - &q * (q.transpose() * v)
}

fn lineality_vectors(l: &Subspace) -> Vec<DVector<f64>> {
    (0..l.dim()).map(|j| l.vector(j)).collect()
}

impl ConvexBody {
    pub fn new(vertices: Vec<DVector<f64>>, lineality: Vec<DVector<f64>>) -> Result<Self, ConvexError> {
        let dim = vertices.first().or(lineality.first()).map(|v| v.len()).ok_or(ConvexError::Empty)?;
        for v in vertices.iter().chain(&lineality) {
            if v.len() != dim {
                return Err(ConvexError::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        let l = Subspace::span(dim, &lineality);
        let mut pts: Vec<DVector<f64>> = vertices.iter().map(|v| project_off(&l, v)).collect();
        if pts.is_empty() {
            pts.push(DVector::zeros(dim));
        }
        if !in_hull(&DVector::zeros(dim), &pts, &[]) {
            return Err(ConvexError::MissingOrigin);
        }
        let keep = extreme_points(&pts, &[]);
        let vertices = keep.into_iter().map(|i| pts[i].clone()).collect();
        Ok(Self { dim, vertices, lineality: l })
    }

    pub fn polytope(vertices: Vec<DVector<f64>>) -> Result<Self, ConvexError> {
        Self::new(vertices, Vec::new())
    }

    /// The linear subspace `s` as a body.
    pub fn subspace(s: &Subspace) -> Self {
        let dim = s.ambient_dim();
        Self { dim, vertices: vec![DVector::zeros(dim)], lineality: s.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points of the line-free part, orthogonal to the lineality space.
    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        in_hull(x, &self.vertices, &lineality_vectors(&self.lineality))
    }

    /// Image under a linear map.
    pub fn image(&self, m: &DMatrix<f64>) -> Self {
        let verts = self.vertices.iter().map(|v| m * v).collect();
        let lines = lineality_vectors(&self.lineality).iter().map(|w| m * w).collect();
        Self::new(verts, lines).expect("images of bodies through 0 contain 0")
    }

    /// Minkowski sum.
    pub fn sum(&self, other: &Self) -> Self {
        let mut verts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                verts.push(a + b);
            }
        }
        let mut lines = lineality_vectors(&self.lineality);
        lines.extend(lineality_vectors(&other.lineality));
        Self::new(verts, lines).expect("sum of bodies through 0 contains 0")
    }

    /// Mutual containment of generators.
    pub fn same_as(&self, other: &Self) -> bool {
        self.lineality.same_as(&other.lineality)
            && self.vertices.iter().all(|v| other.contains(v))
            && other.vertices.iter().all(|v| self.contains(v))
    }

    /// Inequalities `gⱼ·x ≤ hⱼ` cutting `C` out of its hull.
    fn inequalities(&self) -> (Vec<DVector<f64>>, Vec<f64>) {
        let w = Subspace::span(self.dim, &self.vertices);
        if w.is_trivial() {
            return (Vec::new(), Vec::new());
        }
        let q = w.orthonormal();
        let coords: Vec<DVector<f64>> = self.vertices.iter().map(|v| q.transpose() * v).collect();
        let hs = facets(&coords);
        (hs.iter().map(|h| &q * &h.normal).collect(), hs.iter().map(|h| h.offset).collect())
    }

    /// `C ∩ u`.
    pub fn intersect_subspace(&self, u: &Subspace) -> Self {
        let hull = linear_hull(self);
        let within = u.intersection(&hull);
        let lines = within.intersection(&self.lineality);
        let rest = if lines.is_trivial() {
            within.clone()
        } else {
            within.intersection(&lines.complement(&DMatrix::identity(self.dim, self.dim)))
        };
        let (g, h) = self.inequalities();
        let mut verts = vec![DVector::zeros(self.dim)];
        if !rest.is_trivial() && !g.is_empty() {
            let q = rest.orthonormal();
            let gm = columns_to_matrix(self.dim, &g).transpose() * &q;
            verts = vertices_of(&gm, &DVector::from_vec(h)).into_iter().map(|y| &q * y).collect();
        }
        Self::new(verts, lineality_vectors(&lines)).expect("C ∩ U contains 0")
    }
}

/// `L(C)`.
pub fn lineality_space(c: &ConvexBody) -> Subspace {
    c.lineality.clone()
}

/// `H(C)`, the span of `C`.
pub fn linear_hull(c: &ConvexBody) -> Subspace {
    let mut gens = c.vertices.clone();
    gens.extend(lineality_vectors(&c.lineality));
    Subspace::span(c.dim, &gens)
}

/// Projections of `C` onto each of `parts` along the others, if the parts form
/// a direct sum equal to `H(C)`.
fn projections(c: &ConvexBody, parts: &[Subspace]) -> Option<Vec<DMatrix<f64>>> {
    let n = c.dim;
    let hull = linear_hull(c);
    let total: usize = parts.iter().map(|p| p.dim()).sum();
    let mut t = DMatrix::zeros(n, 0);
    for p in parts {
        t = hstack(&t, p.basis());
    }
    if total != hull.dim() || rank(&t) != total {
        return None;
    }
    if parts.iter().any(|p| !hull.contains_subspace(p)) {
        return None;
    }
    let perp = hull.complement(&DMatrix::identity(n, n));
    let full = hstack(&t, perp.basis());
    let inv = full.try_inverse()?;
    let mut out = Vec::with_capacity(parts.len());
    let mut offset = 0;
    for p in parts {
        out.push(p.basis() * inv.rows(offset, p.dim()));
        offset += p.dim();
    }
    Some(out)
}

fn match_point(points: &[DVector<f64>], x: &DVector<f64>) -> bool {
    points.iter().any(|p| (p - x).norm() <= 1e-7 * p.norm().max(1.0))
}

/// Whether `C = ⊕ Pᵢ(C)` for the given complementary subspaces of `H(C)`;
/// returns the parts when it is.
pub fn split(c: &ConvexBody, parts: &[Subspace]) -> Option<Vec<ConvexBody>> {
    let projs = projections(c, parts)?;
    let bodies: Vec<ConvexBody> = projs.iter().map(|p| c.image(p)).collect();
    for b in &bodies {
        if !c.lineality.contains_subspace(&b.lineality) {
            return None;
        }
    }
    // Every combination of part vertices must land in C.
    let mut combos: Vec<DVector<f64>> = vec![DVector::zeros(c.dim)];
    for b in &bodies {
        let mut next = Vec::with_capacity(combos.len() * b.vertices.len());
        for s in &combos {
            for v in &b.vertices {
                next.push(s + v);
            }
        }
        combos = next;
        if combos.len() > 100_000 {
            return None;
        }
    }
    let lines = lineality_vectors(&c.lineality);
    let ok = if c.lineality.is_trivial() {
        combos.len() == c.vertices.len() && combos.iter().all(|x| match_point(&c.vertices, x))
    } else {
        combos.iter().all(|x| in_hull(x, &c.vertices, &lines))
    };
    ok.then_some(bodies)
}

#[derive(Debug, Clone)]
pub struct Part {
    pub subspace: Subspace,
    pub body: ConvexBody,
    /// Certified indecomposable by the exhaustive search (always true for the
    /// lineality part only when it is at most one-dimensional).
    pub indecomposable: bool,
}

#[derive(Debug, Clone)]
pub struct DirectSumDecomposition {
    pub parts: Vec<Part>,
    /// Index of the `L(C)` part, if `C` contains a line.
    pub lineality_part: Option<usize>,
    /// Pairwise orthogonality of the parts under the attached inner product.
    pub orthogonal: Option<bool>,
    /// More than one finest splitting was found.
    pub ambiguous: bool,
    /// Set when the dimension or component count exceeded the search cap.
    pub partial: bool,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let p = self.0[i];
        if p == i {
            return i;
        }
        let r = self.find(p);
        self.0[i] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Edge directions of a line-free polytope, one per parallel class.
pub fn edge_directions(vertices: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for (i, j) in edges(vertices, &[]) {
        let d = (&vertices[j] - &vertices[i]).normalize();
        let lead = d.iter().find(|x| x.abs() > 1e-9).copied().unwrap_or(1.0);
        let d = if lead < 0.0 { -d } else { d };
        if !out.iter().any(|e| (e - &d).norm() < 1e-9) {
            out.push(d);
        }
    }
    out
}

/// Connected components of the linear matroid on `dirs`, from fundamental
/// circuits with respect to a greedy basis.
pub fn matroid_components(dirs: &[DVector<f64>]) -> Vec<Vec<usize>> {
    if dirs.is_empty() {
        return Vec::new();
    }
    let n = dirs[0].len();
    let mut basis: Vec<usize> = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let mut cols: Vec<DVector<f64>> = basis.iter().map(|&b| dirs[b].clone()).collect();
        cols.push(d.clone());
        if rank(&columns_to_matrix(n, &cols)) == cols.len() {
            basis.push(i);
        }
    }
    let bm = columns_to_matrix(n, &basis.iter().map(|&b| dirs[b].clone()).collect::<Vec<_>>());
    let pinv = pseudo_inverse(&bm);
    let mut uf = UnionFind((0..dirs.len()).collect());
    for (i, d) in dirs.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let coeff = &pinv * d;
        for (k, &b) in basis.iter().enumerate() {
            if coeff[k].abs() > 1e-9 {
                uf.union(i, b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for i in 0..dirs.len() {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Set partitions of `0..k` as group labels, coarsest last.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            cur.push(l);
            rec(cur, k, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), k, &mut out);
    out
}

/// Finest decomposition `C = L(C) ⊕ C₁ ⊕ … ⊕ C_k`. With a gram matrix, the
/// remaining parts are taken orthogonal to `L(C)`; otherwise the Euclidean
/// complement is used.
pub fn gruber_decompose(c: &ConvexBody, gram: Option<&DMatrix<f64>>) -> DirectSumDecomposition {
    let n = c.dim;
    let g = gram.cloned().unwrap_or_else(|| DMatrix::identity(n, n));
    let hull = linear_hull(c);
    let l = c.lineality.clone();
    let mut parts = Vec::new();
    let mut lineality_part = None;

    // Split off L(C) along its complement inside H(C).
    let w = if l.is_trivial() { hull.clone() } else { hull.intersection(&l.complement(&g)) };
    let line_free = if l.is_trivial() {
        c.clone()
    } else {
        let pr = projections(c, &[l.clone(), w.clone()]).expect("L and its complement span H(C)");
        lineality_part = Some(0);
        parts.push(Part { subspace: l.clone(), body: ConvexBody::subspace(&l), indecomposable: l.dim() <= 1 });
        c.image(&pr[1])
    };

    let mut partial = w.dim() > SEARCH_CAP;
    let mut ambiguous = false;
    if !w.is_trivial() {
        let dirs = edge_directions(&line_free.vertices);
        let comps = matroid_components(&dirs);
        let spans: Vec<Subspace> = comps
            .iter()
            .map(|cmp| Subspace::span(n, &cmp.iter().map(|&i| dirs[i].clone()).collect::<Vec<_>>()))
            .collect();
        let k = spans.len();
        let candidates: Vec<Vec<usize>> = if k <= MAX_EXHAUSTIVE_COMPONENTS && !partial {
            let mut ps = set_partitions(k);
            ps.sort_by_key(|p| std::cmp::Reverse(p.iter().copied().max().map_or(0, |m| m + 1)));
            ps
        } else {
            partial = true;
            vec![(0..k).collect(), vec![0; k]]
        };
        let mut best: Option<(usize, Vec<Subspace>, Vec<ConvexBody>)> = None;
        for labels in candidates {
            let groups = labels.iter().copied().max().map_or(0, |m| m + 1);
            if let Some((count, _, _)) = &best {
                if groups < *count {
                    break;
                }
            }
            let subs: Vec<Subspace> = (0..groups)
                .map(|gi| {
                    let mut b = DMatrix::zeros(n, 0);
                    for (ci, _) in labels.iter().enumerate().filter(|(_, &x)| x == gi) {
                        b = hstack(&b, spans[ci].basis());
                    }
                    Subspace::span_of(&b)
                })
                .collect();
            if let Some(bodies) = split(&line_free, &subs) {
                match &best {
                    Some(_) => ambiguous = true,
                    None => best = Some((groups, subs, bodies)),
                }
            }
        }
        let (_, subs, bodies) = best.unwrap_or_else(|| (1, vec![w.clone()], vec![line_free.clone()]));
        for (s, b) in subs.into_iter().zip(bodies) {
            let comps_inside = spans.iter().filter(|sp| s.contains_subspace(sp)).count();
            parts.push(Part { subspace: s, body: b, indecomposable: !partial || comps_inside == 1 });
        }
    }
    let orthogonal = gram.map(|g| {
        (0..parts.len()).all(|i| {
            (i + 1..parts.len()).all(|j| (parts[i].subspace.basis().transpose() * g * parts[j].subspace.basis()).amax() <= 1e-9)
        })
    });
    DirectSumDecomposition { parts, lineality_part, orthogonal, ambiguous, partial }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaEuclReport {
    pub dim_a_cap_b: usize,
    /// Every generator of `P^B((A∩B) + Ā)` lies in `B`.
    pub image_in_b: bool,
    /// Every generator of `B` lies in `P^B((A∩B) + Ā)`.
    pub b_in_image: bool,
}

impl LemmaEuclReport {
    pub fn pass(&self) -> bool {
        self.image_in_b && self.b_in_image
    }
}

fn check_orthogonal_split(c: &ConvexBody, gram: &DMatrix<f64>, s: &Subspace, sbar: &Subspace, name: &str) -> Result<(), ConvexError> {
    if (s.basis().transpose() * gram * sbar.basis()).amax() > 1e-9 {
        return Err(ConvexError::Precondition(format!("{name} is not orthogonal to its complement")));
    }
    if split(c, &[s.clone(), sbar.clone()]).is_none() {
        return Err(ConvexError::Precondition(format!("{name} and its complement do not decompose C")));
    }
    Ok(())
}

/// Checks `P^B((A∩B) + Ā) = B` for two orthogonal decompositions
/// `C = A ⊕ Ā = B ⊕ B̄`, with each part given by its subspace.
pub fn check_lemma_eucl(
    c: &ConvexBody,
    gram: &DMatrix<f64>,
    a: &Subspace,
    abar: &Subspace,
    b: &Subspace,
    bbar: &Subspace,
) -> Result<LemmaEuclReport, ConvexError> {
    check_orthogonal_split(c, gram, a, abar, "A")?;
    check_orthogonal_split(c, gram, b, bbar, "B")?;
    let body_a = c.intersect_subspace(a);
    let body_abar = c.intersect_subspace(abar);
    let body_b = c.intersect_subspace(b);
    let a_cap_b = body_a.intersect_subspace(b);
    let sum = a_cap_b.sum(&body_abar);
    let pb = projections(c, &[b.clone(), bbar.clone()]).expect("checked above");
    let image = sum.image(&pb[0]);
    let image_in_b = image.lineality_in(&body_b) && image.vertices.iter().all(|v| body_b.contains(v));
    let b_in_image = body_b.lineality_in(&image) && body_b.vertices.iter().all(|v| image.contains(v));
    Ok(LemmaEuclReport { dim_a_cap_b: linear_hull(&a_cap_b).dim(), image_in_b, b_in_image })
}

impl ConvexBody {
    fn lineality_in(&self, other: &ConvexBody) -> bool {
        other.lineality.contains_subspace(&self.lineality)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaEuclhelpReport {
    pub dim_b: usize,
    /// `dim L(B)`.
    pub dim_lineality_b: usize,
    /// `B = L(B)`.
    pub pass: bool,
}

/// For orthogonal `C = A ⊕ Ā = B ⊕ B̄` with `B ∩ A = B ∩ Ā = {0}`, checks
/// that `B` is a linear space.
pub fn check_lemma_euclhelp(
    c: &ConvexBody,
    gram: &DMatrix<f64>,
    a: &Subspace,
    abar: &Subspace,
    b: &Subspace,
    bbar: &Subspace,
) -> Result<LemmaEuclhelpReport, ConvexError> {
    check_orthogonal_split(c, gram, a, abar, "A")?;
    check_orthogonal_split(c, gram, b, bbar, "B")?;
    for (s, name) in [(a, "A"), (abar, "Ā")] {
        let meet = b.intersection(s);
        if !meet.is_trivial() {
            return Err(ConvexError::Precondition(format!("B ∩ {name} has dimension {}", meet.dim())));
        }
    }
    let body_b = c.intersect_subspace(b);
    let dim_lineality_b = body_b.lineality.dim();
    Ok(LemmaEuclhelpReport { dim_b: b.dim(), dim_lineality_b, pass: dim_lineality_b == b.dim() })
}

/// JSON form `{"vertices": [[...]], "lineality": [[...]], "gram": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodySpec {
    #[serde(default)]
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub lineality: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<f64>>>,
}

impl BodySpec {
    pub fn body(&self) -> Result<ConvexBody, ConvexError> {
        let vs = self.vertices.iter().map(|v| DVector::from_column_slice(v)).collect();
        let ls = self.lineality.iter().map(|v| DVector::from_column_slice(v)).collect();
        ConvexBody::new(vs, ls)
    }

    pub fn gram_matrix(&self) -> Result<Option<DMatrix<f64>>, ConvexError> {
        let Some(rows) = &self.gram else { return Ok(None) };
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(ConvexError::DimensionMismatch { expected: n, found: bad.len() });
        }
        Ok(Some(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }
}

/// Canonical multiset of part hulls, for comparing decompositions.
pub fn part_signature(d: &DirectSumDecomposition) -> BTreeSet<Vec<i64>> {
    d.parts
        .iter()
        .map(|p| {
            let q = p.subspace.orthonormal();
            let proj = &q * q.transpose();
            proj.iter().map(|x| (x / GEOM_TOL.sqrt()).round() as i64).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn square() -> ConvexBody {
        ConvexBody::polytope(vec![v(&[1.0, 1.0]), v(&[1.0, -1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0])]).unwrap()
    }

    #[test]
    fn lineality_examples() {
        let strip = ConvexBody::new(vec![v(&[0.0, 1.0]), v(&[0.0, -1.0])], vec![v(&[1.0, 0.0])]).unwrap();
        assert!(lineality_space(&strip).same_as(&Subspace::coordinate(2, &[0])));
        assert!(lineality_space(&square()).is_trivial());
        let plane = ConvexBody::new(vec![], vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert_eq!(lineality_space(&plane).dim(), 2);
    }

    #[test]
    fn hull_examples() {
        let seg = ConvexBody::polytope(vec![v(&[1.0, 0.0, 0.0]), v(&[-1.0, 0.0, 0.0])]).unwrap();
        assert!(linear_hull(&seg).same_as(&Subspace::coordinate(3, &[0])));
        let tri = ConvexBody::polytope(vec![v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        assert!(linear_hull(&tri).same_as(&Subspace::coordinate(3, &[0, 1])));
        let cube: Vec<DVector<f64>> =
            (0..8).map(|m| DVector::from_fn(3, |i, _| if m >> i & 1 == 1 { 1.0 } else { -1.0 })).collect();
        assert_eq!(linear_hull(&ConvexBody::polytope(cube).unwrap()).dim(), 3);
    }

    #[test]
    fn origin_required() {
        assert!(matches!(ConvexBody::polytope(vec![v(&[1.0]), v(&[2.0])]), Err(ConvexError::MissingOrigin)));
    }

    #[test]
    fn square_splits_along_axes() {
        let d = gruber_decompose(&square(), None);
        assert_eq!(d.parts.len(), 2);
        assert!(!d.partial && !d.ambiguous);
        for p in &d.parts {
            assert_eq!(p.subspace.dim(), 1);
            assert!(p.indecomposable);
        }
    }

    #[test]
    fn triangle_is_indecomposable() {
        let tri = ConvexBody::polytope(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        let d = gruber_decompose(&tri, None);
        assert_eq!(d.parts.len(), 1);
        assert!(d.parts[0].indecomposable);
    }

    #[test]
    fn strip_splits_off_lineality() {
        let strip = ConvexBody::new(vec![v(&[0.3, 1.0]), v(&[-0.2, -1.0])], vec![v(&[1.0, 0.0])]).unwrap();
        let d = gruber_decompose(&strip, Some(&DMatrix::identity(2, 2)));
        assert_eq!(d.parts.len(), 2);
        assert_eq!(d.lineality_part, Some(0));
        assert!(d.parts[1].subspace.same_as(&Subspace::coordinate(2, &[1])));
        assert_eq!(d.orthogonal, Some(true));
    }

    #[test]
    fn matroid_components_of_square_and_triangle() {
        assert_eq!(matroid_components(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).len(), 2);
        assert_eq!(matroid_components(&[v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, -1.0])]).len(), 1);
    }

    #[test]
    fn intersect_cube_with_diagonal_plane() {
        let cube: Vec<DVector<f64>> =
            (0..8).map(|m| DVector::from_fn(3, |i, _| if m >> i & 1 == 1 { 1.0 } else { -1.0 })).collect();
        let c = ConvexBody::polytope(cube).unwrap();
        let u = Subspace::from_vectors(3, &[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let cut = c.intersect_subspace(&u);
        assert_eq!(cut.vertices().len(), 4);
        assert!(cut.contains(&v(&[1.0, 1.0, 1.0])));
        assert!(!cut.contains(&v(&[1.0, 0.0, 0.0])));
    }

    #[test]
    fn euclhelp_refuses_shared_direction() {
        let plane = ConvexBody::new(vec![], vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        let x = Subspace::coordinate(2, &[0]);
        let y = Subspace::coordinate(2, &[1]);
        let g = DMatrix::identity(2, 2);
        assert!(matches!(check_lemma_euclhelp(&plane, &g, &x, &y, &x, &y), Err(ConvexError::Precondition(_))));
    }
}
