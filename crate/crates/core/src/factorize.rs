//! Search for product decompositions of finite metric spaces, factorization
//! into irreducibles, isometry groups, and the exact sequence
//! `1 → Π Iso(Yᵢ) → Iso(X) → 𝒫 → 1`.
//!
//! Every witness `X = Y × Ȳ` with `|Y| ≤ |Ȳ|` is determined by its `Y`-fiber
//! `F` through a base point: the `Ȳ`-fibers are the nearest-point cells of
//! `F`, and the `Y`-fibers are the nearest-point cells of the `Ȳ`-fiber through
//! the base point. The search therefore runs over candidate sets `F ∋ x₀` of
//! size at most `√n`, builds the labeling, and hands it to the verifier.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{validate, FiniteMetricSpace, Tolerance, ValidationReport};
use crate::polytope::combinations;
use crate::product::ProductWitness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest space accepted by the searches.
    pub max_points: usize,
    /// Cap on candidate fibers examined by one witness search.
    pub max_candidates: usize,
    /// Cap on backtracking nodes in isometry searches.
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_points: 24, max_candidates: 2_000_000, max_nodes: 20_000_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("space has {n} points, budget allows {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("budget exhausted: {0}")]
    BudgetExceeded(String),
    #[error("input is not a metric: {0:?}")]
    NotAMetric(ValidationReport),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Witnesses found by [`enumerate_witnesses`]. `complete` is false when the
/// candidate budget ran out before the search finished.
#[derive(Debug, Clone)]
pub struct WitnessSearch {
    pub witnesses: Vec<ProductWitness>,
    pub complete: bool,
}

fn check_input(space: &FiniteMetricSpace, tol: &Tolerance, budget: &Budget) -> Result<(), FactorError> {
    if space.len() > budget.max_points {
        return Err(FactorError::TooLarge { n: space.len(), cap: budget.max_points });
    }
    let report = validate(space, tol);
    if !report.is_ok() {
        return Err(FactorError::NotAMetric(report));
    }
    Ok(())
}

/// Index of the unique nearest point of `set` to `p`, if the minimum is
/// attained only once (beyond `tol`).
fn unique_nearest(space: &FiniteMetricSpace, set: &[usize], p: usize, tol: f64) -> Option<usize> {
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (k, &q) in set.iter().enumerate() {
        let d = space.d(p, q);
        if d < best.1 {
            second = best.1;
            best = (k, d);
        } else if d < second {
            second = d;
        }
    }
    (second - best.1 > tol).then_some(best.0)
}

/// The witness whose `Y`-fiber through `fiber[0]` is `fiber`, if there is one.
pub fn witness_from_fiber(space: &FiniteMetricSpace, fiber: &[usize], tol: &Tolerance) -> Option<ProductWitness> {
    let n = space.len();
    let a = fiber.len();
    if a == 0 || !n.is_multiple_of(a) {
        return None;
    }
    let b = n / a;
    let mut y_label = vec![0; n];
    let mut counts = vec![0; a];
    for (p, y) in y_label.iter_mut().enumerate() {
        let k = unique_nearest(space, fiber, p, tol.tol_metric)?;
        counts[k] += 1;
        if counts[k] > b {
            return None;
        }
        *y = k;
    }
    let base: Vec<usize> = (0..n).filter(|&p| y_label[p] == 0).collect();
    let mut ybar_label = vec![0; n];
    for (p, yb) in ybar_label.iter_mut().enumerate() {
        *yb = unique_nearest(space, &base, p, tol.tol_metric)?;
    }
    ProductWitness::with_tolerance(space.clone(), y_label, ybar_label, *tol).ok()
}

/// Every nontrivial witness of `space`, one per decomposition up to factor
/// swap and relabeling, in canonical form and sorted.
pub fn enumerate_witnesses(space: &FiniteMetricSpace, tol: &Tolerance, budget: &Budget) -> Result<WitnessSearch, FactorError> {
    check_input(space, tol, budget)?;
    let n = space.len();
    let mut jobs: Vec<Vec<usize>> = Vec::new();
    let mut complete = true;
    'sizes: for a in 2..=n {
        if a * a > n {
            break;
        }
        if !n.is_multiple_of(a) {
            continue;
        }
        for rest in combinations(n - 1, a - 1) {
            if jobs.len() >= budget.max_candidates {
                complete = false;
                break 'sizes;
            }
            let mut fiber = vec![0];
            fiber.extend(rest.iter().map(|r| r + 1));
            jobs.push(fiber);
        }
    }
    let found: Vec<ProductWitness> = jobs
        .par_iter()
        .filter_map(|f| witness_from_fiber(space, f, tol))
        .map(|w| w.canonical())
        .collect();
    let mut unique: BTreeMap<(Vec<usize>, Vec<usize>), ProductWitness> = BTreeMap::new();
    for w in found {
        unique.entry(w.canonical_key()).or_insert(w);
    }
    Ok(WitnessSearch { witnesses: unique.into_values().collect(), complete })
}

/// A maximal decomposition seen from a base point: the factor fibers through
/// it, each a sorted point set, listed in sorted order.
pub type FiberDecomposition = Vec<Vec<usize>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub factors: Vec<FiniteMetricSpace>,
    /// `coordinates[p][i]` is the point of `factors[i]` that `p` projects to.
    pub coordinates: Vec<Vec<usize>>,
    pub irreducible: Vec<bool>,
    pub base_point: usize,
    /// Fibers through the base point of the returned factorization.
    pub fibers: FiberDecomposition,
    pub unique: bool,
    /// Other maximal decompositions, as fibers through the base point.
    pub alternatives: Vec<FiberDecomposition>,
    /// False when some search ran out of budget.
    pub complete: bool,
}

impl FactorizationReport {
    /// Binary witnesses `X_k = F_k × X_{k+1}` peeling off one factor at a time,
    /// each on the sub-space of points agreeing with the base point in the
    /// earlier factors.
    pub fn chain(&self, space: &FiniteMetricSpace) -> Vec<ProductWitness> {
        let base = &self.coordinates[self.base_point];
        let m = self.factors.len();
        let mut out = Vec::new();
        for k in 0..m.saturating_sub(1) {
            let pts: Vec<usize> = (0..space.len())
                .filter(|&p| (0..k).all(|i| self.coordinates[p][i] == base[i]))
                .collect();
            let sub = space.subspace(&pts);
            let y: Vec<usize> = pts.iter().map(|&p| self.coordinates[p][k]).collect();
            let radix: Vec<usize> = (k + 1..m).map(|i| self.factors[i].len()).collect();
            let ybar: Vec<usize> = pts
                .iter()
                .map(|&p| (k + 1..m).zip(&radix).fold(0, |acc, (i, r)| acc * r + self.coordinates[p][i]))
                .collect();
            if let Ok(w) = ProductWitness::new(sub, y, ybar) {
                out.push(w);
            }
        }
        out
    }
}

struct Factorizer<'a> {
    tol: Tolerance,
    budget: &'a Budget,
    complete: bool,
    irreducible_cache: BTreeMap<Vec<usize>, bool>,
}

impl Factorizer<'_> {
    fn witnesses(&mut self, space: &FiniteMetricSpace) -> Result<Vec<ProductWitness>, FactorError> {
        let s = enumerate_witnesses(space, &self.tol, self.budget)?;
        self.complete &= s.complete;
        Ok(s.witnesses)
    }

    fn is_irreducible(&mut self, space: &FiniteMetricSpace, key: Vec<usize>) -> Result<bool, FactorError> {
        if let Some(&v) = self.irreducible_cache.get(&key) {
            return Ok(v);
        }
        let v = self.witnesses(space)?.is_empty();
        self.irreducible_cache.insert(key, v);
        Ok(v)
    }

    /// Witnesses oriented so the `Y`-side is irreducible.
    fn irreducible_splits(&mut self, space: &FiniteMetricSpace, points: &[usize]) -> Result<Vec<ProductWitness>, FactorError> {
        let mut out = Vec::new();
        for w in self.witnesses(space)? {
            for o in [w.clone(), w.swapped()] {
                let fiber: Vec<usize> = o.y_fiber(0).iter().map(|&p| points[p]).collect();
                let mut key = fiber.clone();
                key.sort_unstable();
                if self.is_irreducible(o.y_factor(), key)? {
                    out.push(o);
                }
            }
        }
        Ok(out)
    }

    /// Factors and coordinates of `space`, whose points are `points` of the input.
    fn split(
        &mut self,
        space: &FiniteMetricSpace,
        points: &[usize],
    ) -> Result<(Vec<FiniteMetricSpace>, Vec<Vec<usize>>), FactorError> {
        let n = space.len();
        if n <= 1 {
            return Ok((Vec::new(), vec![Vec::new(); n]));
        }
        let splits = self.irreducible_splits(space, points)?;
        let Some(w) = splits.into_iter().next() else {
            return Ok((vec![space.clone()], (0..n).map(|p| vec![p]).collect()));
        };
        let rest_points: Vec<usize> = w.ybar_fiber(0).iter().map(|&p| points[p]).collect();
        let (rest_factors, rest_coords) = self.split(w.ybar_factor(), &rest_points)?;
        let mut factors = vec![w.y_factor().clone()];
        factors.extend(rest_factors);
        let coords = (0..n)
            .map(|p| {
                let mut c = vec![w.y_label()[p]];
                c.extend(&rest_coords[w.ybar_label()[p]]);
                c
            })
            .collect();
        Ok((factors, coords))
    }

    /// All maximal decompositions of `space` at base point `x0`, with fibers
    /// expressed in input point indices via `points`.
    fn decompositions(
        &mut self,
        space: &FiniteMetricSpace,
        points: &[usize],
        x0: usize,
    ) -> Result<BTreeSet<FiberDecomposition>, FactorError> {
        let mut out = BTreeSet::new();
        if space.len() <= 1 {
            out.insert(Vec::new());
            return Ok(out);
        }
        let splits = self.irreducible_splits(space, points)?;
        if splits.is_empty() {
            let mut all = points.to_vec();
            all.sort_unstable();
            out.insert(vec![all]);
            return Ok(out);
        }
        for w in splits {
            let mut fiber: Vec<usize> = w.y_fiber(x0).iter().map(|&p| points[p]).collect();
            fiber.sort_unstable();
            let rest_points: Vec<usize> = w.ybar_fiber(x0).iter().map(|&p| points[p]).collect();
            for mut d in self.decompositions(w.ybar_factor(), &rest_points, w.ybar_label()[x0])? {
                d.push(fiber.clone());
                d.sort();
                out.insert(d);
            }
        }
        Ok(out)
    }
}

/// Splits `space` recursively into irreducible factors and cross-checks
/// fiber-level uniqueness against every maximal decomposition at point 0.
pub fn factorize(space: &FiniteMetricSpace, tol: &Tolerance, budget: &Budget) -> Result<FactorizationReport, FactorError> {
    check_input(space, tol, budget)?;
    let mut f = Factorizer { tol: *tol, budget, complete: true, irreducible_cache: BTreeMap::new() };
    let points: Vec<usize> = (0..space.len()).collect();
    let (factors, coordinates) = f.split(space, &points)?;
    let base_point = 0;
    let mut fibers: FiberDecomposition = (0..factors.len())
        .map(|i| {
            (0..space.len())
                .filter(|&p| (0..factors.len()).all(|k| k == i || coordinates[p][k] == coordinates[base_point][k]))
                .collect()
        })
        .collect();
    fibers.sort();
    let all = f.decompositions(space, &points, base_point)?;
    let alternatives: Vec<FiberDecomposition> = all.into_iter().filter(|d| *d != fibers).collect();
    let mut irreducible = Vec::with_capacity(factors.len());
    for factor in &factors {
        let search = enumerate_witnesses(factor, tol, budget)?;
        irreducible.push(search.complete && search.witnesses.is_empty());
    }
    Ok(FactorizationReport {
        factors,
        coordinates,
        irreducible,
        base_point,
        fibers,
        unique: alternatives.is_empty(),
        alternatives,
        complete: f.complete,
    })
}

struct IsoSearch<'a> {
    a: &'a FiniteMetricSpace,
    b: &'a FiniteMetricSpace,
    tol: f64,
    profiles_a: Vec<Vec<f64>>,
    profiles_b: Vec<Vec<f64>>,
    nodes: usize,
    max_nodes: usize,
    limit: usize,
    found: Vec<Vec<usize>>,
}

fn profile(s: &FiniteMetricSpace, p: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..s.len()).map(|q| s.d(p, q)).collect();
    v.sort_by(f64::total_cmp);
    v
}

impl IsoSearch<'_> {
    fn compatible(&self, p: usize, q: usize) -> bool {
        self.profiles_a[p].iter().zip(&self.profiles_b[q]).all(|(x, y)| (x - y).abs() <= self.tol)
    }

    fn run(&mut self, map: &mut Vec<usize>, used: &mut [bool]) -> Result<(), FactorError> {
        if self.found.len() >= self.limit {
            return Ok(());
        }
        let k = map.len();
        if k == self.a.len() {
            self.found.push(map.clone());
            return Ok(());
        }
        for q in 0..self.b.len() {
            if used[q] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(FactorError::BudgetExceeded(format!("isometry search passed {} nodes", self.max_nodes)));
            }
            if !self.compatible(k, q) {
                continue;
            }
            if (0..k).any(|j| (self.a.d(k, j) - self.b.d(q, map[j])).abs() > self.tol) {
                continue;
            }
            map.push(q);
            used[q] = true;
            self.run(map, used)?;
            used[q] = false;
            map.pop();
            if self.found.len() >= self.limit {
                return Ok(());
            }
        }
        Ok(())
    }
}

fn search_isometries(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    tol: f64,
    budget: &Budget,
    limit: usize,
) -> Result<Vec<Vec<usize>>, FactorError> {
    let cap = budget.max_points;
    if a.len() > cap || b.len() > cap {
        return Err(FactorError::TooLarge { n: a.len().max(b.len()), cap });
    }
    if a.len() != b.len() {
        return Ok(Vec::new());
    }
    let mut s = IsoSearch {
        a,
        b,
        tol,
        profiles_a: (0..a.len()).map(|p| profile(a, p)).collect(),
        profiles_b: (0..b.len()).map(|p| profile(b, p)).collect(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        limit,
        found: Vec::new(),
    };
    s.run(&mut Vec::with_capacity(a.len()), &mut vec![false; b.len()])?;
    Ok(s.found)
}

/// An isometry `a → b` as a point map, if one exists.
pub fn find_isometry(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    tol: &Tolerance,
    budget: &Budget,
) -> Result<Option<Vec<usize>>, FactorError> {
    Ok(search_isometries(a, b, tol.tol_metric, budget, 1)?.into_iter().next())
}

/// All isometries of `space` as permutations `p ↦ g[p]`, sorted.
pub fn isometry_group(space: &FiniteMetricSpace, tol: &Tolerance, budget: &Budget) -> Result<Vec<Vec<usize>>, FactorError> {
    let mut g = search_isometries(space, space, tol.tol_metric, budget, usize::MAX)?;
    g.sort();
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryGroupReport {
    pub order: usize,
    pub generators: Vec<Vec<usize>>,
    /// `Π |Iso(Yᵢ)|`.
    pub factor_group_order: usize,
    /// `|𝒫|`, the permutations of factors matching isometric ones.
    pub permutation_group_order: usize,
    /// Every isometry fixing all factor fibers through the base point
    /// pointwise is the identity.
    pub kernel_trivial: bool,
    pub exact: bool,
}

fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&p| g[p]).collect()
}

/// Greedy generating set: keep an element whenever it is not yet in the
/// subgroup generated so far.
pub fn generators(group: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let Some(first) = group.first() else { return Vec::new() };
    let id: Vec<usize> = (0..first.len()).collect();
    let mut closure: BTreeSet<Vec<usize>> = BTreeSet::from([id]);
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for g in group {
        if closure.contains(g) {
            continue;
        }
        gens.push(g.clone());
        let mut frontier: Vec<Vec<usize>> = closure.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for s in &gens {
                let y = compose(s, &x);
                if closure.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Checks `|Iso(X)| = Π|Iso(Yᵢ)| · |𝒫|` and the kernel characterization
/// against a unique factorization.
pub fn verify_exact_sequence(
    space: &FiniteMetricSpace,
    report: &FactorizationReport,
    tol: &Tolerance,
    budget: &Budget,
) -> Result<IsometryGroupReport, FactorError> {
    if !report.unique {
        return Err(FactorError::Precondition("factorization is not unique at the fiber level".into()));
    }
    if !report.complete {
        return Err(FactorError::Precondition("factorization search was incomplete".into()));
    }
    if report.coordinates.len() != space.len() {
        return Err(FactorError::Precondition("report does not describe this space".into()));
    }
    let group = isometry_group(space, tol, budget)?;
    let mut factor_group_order = 1usize;
    for f in &report.factors {
        factor_group_order *= isometry_group(f, tol, budget)?.len();
    }
    let mut classes: Vec<usize> = Vec::new();
    let mut reps: Vec<&FiniteMetricSpace> = Vec::new();
    for f in &report.factors {
        let mut hit = None;
        for (c, r) in reps.iter().enumerate() {
            if find_isometry(f, r, tol, budget)?.is_some() {
                hit = Some(c);
                break;
            }
        }
        match hit {
            Some(c) => classes[c] += 1,
            None => {
                reps.push(f);
                classes.push(1);
            }
        }
    }
    let permutation_group_order: usize = classes.iter().map(|&k| factorial(k)).product();

    let x0 = report.base_point;
    let fixed: BTreeSet<usize> = report.fibers.iter().flatten().cloned().collect();
    let kernel_trivial = group
        .iter()
        .filter(|g| g[x0] == x0 && fixed.iter().all(|&p| g[p] == p))
        .all(|g| g.iter().enumerate().all(|(i, &p)| i == p));

    let order = group.len();
    let exact = kernel_trivial && order == factor_group_order * permutation_group_order;
    Ok(IsometryGroupReport {
        order,
        generators: generators(&group),
        factor_group_order,
        permutation_group_order,
        kernel_trivial,
        exact,
    })
}
