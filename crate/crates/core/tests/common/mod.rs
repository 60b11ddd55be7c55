#![allow(dead_code)]

use std::collections::BTreeSet;

use derham::convex::{edge_directions, linear_hull, ConvexBody};
use derham::linalg::Subspace;
use derham::metric::{product, product_all, FiniteMetricSpace, Tolerance};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn k2(d: f64) -> FiniteMetricSpace {
    FiniteMetricSpace::two_point(d)
}

pub fn tol(s: &FiniteMetricSpace) -> Tolerance {
    Tolerance::for_space(s)
}

pub fn random_metric(rng: &mut ChaCha8Rng, k: usize) -> FiniteMetricSpace {
    let mut dist = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let d = rng.random_range(1.0..2.0);
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    FiniteMetricSpace::new((0..k).map(|i| i.to_string()).collect(), dist).unwrap()
}

pub fn shuffled(rng: &mut ChaCha8Rng, s: &FiniteMetricSpace) -> FiniteMetricSpace {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.shuffle(rng);
    s.reordered(&order)
}

/// All partitions of `0..n` into blocks of size `b`, as block labels.
pub fn equal_partitions(n: usize, b: usize) -> Vec<Vec<usize>> {
    fn rec(label: &mut [usize], next: usize, b: usize, out: &mut Vec<Vec<usize>>) {
        let Some(first) = label.iter().position(|&l| l == usize::MAX) else {
            out.push(label.to_vec());
            return;
        };
        let free: Vec<usize> = (first + 1..label.len()).filter(|&p| label[p] == usize::MAX).collect();
        let mut pick = Vec::new();
        choose(&free, b - 1, 0, &mut pick, &mut |chosen| {
            let mut l = label.to_vec();
            l[first] = next;
            for &p in chosen {
                l[p] = next;
            }
            rec(&mut l, next + 1, b, out);
        });
    }
    fn choose(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            choose(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![usize::MAX; n], 0, b, &mut out);
    out
}

/// Transversal labelings: each class of `p` meets each new class exactly once.
pub fn transversals(p: &[usize], classes: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(p: &[usize], label: &mut Vec<usize>, used: &mut Vec<Vec<bool>>, idx: usize, out: &mut Vec<Vec<usize>>) {
        if idx == p.len() {
            out.push(label.clone());
            return;
        }
        let max_new = label[..idx].iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..used.len() {
            if l > max_new {
                break;
            }
            if used[l][p[idx]] {
                continue;
            }
            used[l][p[idx]] = true;
            label[idx] = l;
            rec(p, label, used, idx + 1, out);
            used[l][p[idx]] = false;
        }
    }
    let mut out = Vec::new();
    let mut used = vec![vec![false; classes]; size];
    rec(p, &mut vec![0; p.len()], &mut used, 0, &mut out);
    out
}

pub fn is_witness(s: &FiniteMetricSpace, y: &[usize], yb: &[usize], t: &Tolerance) -> bool {
    let n = s.len();
    let at = |i: usize, j: usize| (0..n).find(|&p| y[p] == i && yb[p] == j).unwrap();
    for p in 0..n {
        for q in 0..n {
            let dy = s.d(at(y[p], yb[p]), at(y[q], yb[p]));
            let dy2 = s.d(at(y[p], yb[q]), at(y[q], yb[q]));
            let db = s.d(at(y[p], yb[p]), at(y[p], yb[q]));
            let db2 = s.d(at(y[q], yb[p]), at(y[q], yb[q]));
            if (dy - dy2).abs() > t.tol_metric || (db - db2).abs() > t.tol_metric {
                return false;
            }
            if (s.sq(p, q) - dy * dy - db * db).abs() > t.tol_sq {
                return false;
            }
        }
    }
    true
}

pub fn key(y: &[usize], yb: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let renum = |l: &[usize]| {
        let mut seen = Vec::new();
        l.iter()
            .map(|x| match seen.iter().position(|s| s == x) {
                Some(i) => i,
                None => {
                    seen.push(*x);
                    seen.len() - 1
                }
            })
            .collect::<Vec<usize>>()
    };
    let (a, b) = (renum(y), renum(yb));
    if (&b, &a) < (&a, &b) {
        (b, a)
    } else {
        (a, b)
    }
}

pub fn brute_force(s: &FiniteMetricSpace) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    let n = s.len();
    let t = tol(s);
    let mut out = BTreeSet::new();
    for b in 2..n {
        if !n.is_multiple_of(b) || n / b < 2 {
            continue;
        }
        // Classes of the Y-label have size b (they are Ȳ-fibers).
        for y in equal_partitions(n, b) {
            for yb in transversals(&y, n / b, b) {
                if is_witness(s, &y, &yb, &t) {
                    out.insert(key(&y, &yb));
                }
            }
        }
    }
    out
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// Random full-dimensional polytope in ℝᵈ with its centroid at the origin.
pub fn random_polytope(rng: &mut ChaCha8Rng, d: usize) -> Vec<DVector<f64>> {
    let m = d + 1 + rng.random_range(1..=3);
    let pts: Vec<DVector<f64>> = (0..m).map(|_| DVector::from_fn(d, |_, _| normal(rng))).collect();
    let c = pts.iter().fold(DVector::zeros(d), |a, p| a + p) / m as f64;
    pts.into_iter().map(|p| p - &c).collect()
}

pub fn embed(p: &DVector<f64>, offset: usize, n: usize) -> DVector<f64> {
    let mut out = DVector::zeros(n);
    out.rows_mut(offset, p.len()).copy_from(p);
    out
}

/// Vertex set of a direct sum is the set of sums of part vertices.
pub fn splits_by_vertices(verts: &[DVector<f64>], u: &Subspace, w: &Subspace, hull: &Subspace) -> bool {
    let n = verts[0].len();
    let perp = hull.complement(&DMatrix::identity(n, n));
    let mut cols: Vec<DVector<f64>> = (0..u.dim()).map(|j| u.vector(j)).collect();
    cols.extend((0..w.dim()).map(|j| w.vector(j)));
    cols.extend((0..perp.dim()).map(|j| perp.vector(j)));
    let t = DMatrix::from_columns(&cols);
    let Some(inv) = t.try_inverse() else { return false };
    let pu = u.basis() * inv.rows(0, u.dim());
    let pw = w.basis() * inv.rows(u.dim(), w.dim());
    let dedup = |xs: Vec<DVector<f64>>| {
        let mut out: Vec<DVector<f64>> = Vec::new();
        for x in xs {
            if !out.iter().any(|y| (y - &x).norm() < 1e-7) {
                out.push(x);
            }
        }
        out
    };
    let vu = dedup(verts.iter().map(|v| &pu * v).collect());
    let vw = dedup(verts.iter().map(|v| &pw * v).collect());
    // Projections of vertices can include non-extreme points; a genuine split
    // reproduces exactly the vertex set, so the counts must match.
    if vu.len() * vw.len() != verts.len() {
        return false;
    }
    vu.iter().all(|a| vw.iter().all(|b| verts.iter().any(|v| (v - (a + b)).norm() < 1e-7)))
}

/// Brute force: C is decomposable iff some subset of edge-direction classes
/// and its complement span complementary subspaces that split the vertices.
pub fn oracle_decomposable(c: &ConvexBody) -> bool {
    let verts = c.vertices();
    let dirs = edge_directions(verts);
    let hull = linear_hull(c);
    let k = dirs.len();
    assert!(k <= 20);
    for mask in 1..(1u32 << k) - 1 {
        let pick = |inside: bool| -> Vec<DVector<f64>> {
            (0..k).filter(|&i| (mask >> i & 1 == 1) == inside).map(|i| dirs[i].clone()).collect()
        };
        let u = Subspace::span(hull.ambient_dim(), &pick(true));
        let w = Subspace::span(hull.ambient_dim(), &pick(false));
        if u.dim() + w.dim() == hull.dim() && splits_by_vertices(verts, &u, &w, &hull) {
            return true;
        }
    }
    false
}


/// Every distance-preserving permutation, by plain backtracking.
pub fn brute_isometries(a: &FiniteMetricSpace, b: &FiniteMetricSpace, t: &Tolerance) -> Vec<Vec<usize>> {
    fn rec(a: &FiniteMetricSpace, b: &FiniteMetricSpace, t: &Tolerance, map: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let p = map.len();
        if p == a.len() {
            out.push(map.clone());
            return;
        }
        for q in 0..b.len() {
            if used[q] || (0..p).any(|r| (a.d(p, r) - b.d(q, map[r])).abs() > t.tol_metric) {
                continue;
            }
            used[q] = true;
            map.push(q);
            rec(a, b, t, map, used, out);
            map.pop();
            used[q] = false;
        }
    }
    let mut out = Vec::new();
    if a.len() == b.len() {
        rec(a, b, t, &mut Vec::new(), &mut vec![false; b.len()], &mut out);
    }
    out
}

/// Seeded spaces of at most 16 points: products of small factors, shuffled
/// products of random metrics, and irreducible random metrics.
pub fn fuzz_corpus() -> Vec<FiniteMetricSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tri = |a, b, c| FiniteMetricSpace::triangle(a, b, c);
    let mut spaces = vec![
        product(&k2(3.0), &k2(4.0)),
        product(&k2(1.0), &k2(1.0)),
        product(&tri(1.0, 1.0, 1.0), &k2(1.0)),
        product(&product(&k2(1.0), &k2(2.0)), &k2(3.0)),
        product_all(&[k2(1.0), k2(1.0), k2(1.0)]),
        product(&tri(1.0, 1.0, 1.0), &tri(1.0, 1.0, 1.0)),
        product(&FiniteMetricSpace::path3(1.0, 1.0), &product(&k2(1.0), &k2(1.0))),
        FiniteMetricSpace::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 0.0], vec![2.0, 1.0]]),
        product_all(&[k2(1.0), k2(1.0), k2(1.0), k2(1.0)]),
        product_all(&[k2(1.0), k2(2.0), k2(1.0), k2(2.0)]),
        product_all(&[k2(1.0), k2(1.5), k2(2.0), k2(2.5)]),
        product(&product(&k2(1.0), &k2(1.0)), &product(&k2(1.3), &k2(1.7))),
    ];
    for k in [4, 6, 8, 9, 12] {
        spaces.push(random_metric(&mut rng, k));
    }
    for (a, b) in [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (2, 6), (4, 4), (2, 8)] {
        let f = random_metric(&mut rng, a);
        let g = random_metric(&mut rng, b);
        spaces.push(shuffled(&mut rng, &product(&f, &g)));
    }
    for _ in 0..4 {
        let fs: Vec<FiniteMetricSpace> = (0..3).map(|_| random_metric(&mut rng, 2)).collect();
        spaces.push(shuffled(&mut rng, &product_all(&fs)));
    }
    spaces
}

/// `C₁ ⊕ C₂` in ℝⁿ (n ≤ 5) through a random linear map, with the planted
/// hulls.
pub fn planted_sum(rng: &mut ChaCha8Rng) -> (ConvexBody, Subspace, Subspace) {
    let d1 = rng.random_range(1..=3);
    let d2 = rng.random_range(1..=(5 - d1).min(3));
    let n = d1 + d2;
    let c1 = random_polytope(rng, d1);
    let c2 = random_polytope(rng, d2);
    let t = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + 0.4 * normal(rng));
    let mut verts = Vec::new();
    for a in &c1 {
        for b in &c2 {
            verts.push(&t * (embed(a, 0, n) + embed(b, d1, n)));
        }
    }
    let body = ConvexBody::polytope(verts).unwrap();
    let s1 = Subspace::coordinate(n, &(0..d1).collect::<Vec<_>>()).transform(&t);
    let s2 = Subspace::coordinate(n, &(d1..n).collect::<Vec<_>>()).transform(&t);
    (body, s1, s2)
}

pub fn random_gram(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 } + 0.4 * normal(rng));
    a.transpose() * a
}
