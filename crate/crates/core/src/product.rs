//! Product calculus on finite metric spaces: witnesses of `X = Y × Ȳ`,
//! fibers and their matchings, recognition of products from an equidistant
//! fiber family, slopes, rectangular subsets, and the intersection checks for
//! two decompositions of the same space.
//!
//! Points are indices into the space's point list. A witness assigns each
//! point a `Y`-coordinate (`y_label`, the value of `P^Y`) and a
//! `Ȳ`-coordinate (`ybar_label`). The `Y`-fiber `Y_x` through `x` is the set
//! of points sharing `x`'s `Ȳ`-coordinate, and vice versa.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Y,
    YBar,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("label vectors have lengths {y} and {ybar} for a space of {n} points")]
    Length { n: usize, y: usize, ybar: usize },
    #[error("{ny} x {nb} index grid does not match {n} points")]
    GridSize { n: usize, ny: usize, nb: usize },
    #[error("index pair ({i},{j}) is taken by points {first} and {second}")]
    Duplicate { i: usize, j: usize, first: usize, second: usize },
    #[error("{side:?}-factor distance between indices {a} and {b} is {first} in one fiber but {second} in another")]
    InconsistentFactor { side: Side, a: usize, b: usize, first: f64, second: f64 },
    #[error("Pythagorean identity fails at points ({x},{z}) with residual {residual:e}")]
    Pythagoras { x: usize, z: usize, residual: f64 },
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiberError {
    #[error("fiber {fiber} has {found} points, expected {expected}")]
    FiberSize { fiber: usize, expected: usize, found: usize },
    #[error("matching ({i},{j}) is not a bijection between the fibers")]
    NotBijective { i: usize, j: usize },
    #[error("point {0} lies in no fiber")]
    Uncovered(usize),
    #[error("composition law fails for fibers ({i},{j},{k}) at position {position}")]
    Composition { i: usize, j: usize, k: usize, position: usize },
    #[error("Pythagorean condition fails for fibers ({i},{j}) at points ({x},{xbar}), residual {residual:e}")]
    Pythagoras { i: usize, j: usize, x: usize, xbar: usize, residual: f64 },
    #[error("fibers ({i},{j}) are not equidistant: d(x, P(x)) varies by {spread:e} at point {x}")]
    NotEquidistant { i: usize, j: usize, x: usize, spread: f64 },
    #[error("fibers {i} and {j} are at distance 0 but are different subsets")]
    Overlap { i: usize, j: usize },
    #[error("assembled map is not an isometry: {0}")]
    Witness(#[from] WitnessError),
    #[error("the family has no fibers")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("the two witnesses live on different spaces")]
    DifferentSpaces,
    #[error("slope of the degenerate segment at point {0}")]
    DegenerateSegment(usize),
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error("fiber family over Z does not align with the base fiber: {0}")]
    Misaligned(String),
    #[error(transparent)]
    Fiber(#[from] FiberError),
}

/// A realization of `X = Y × Ȳ` on a finite space.
#[derive(Debug, Clone)]
pub struct ProductWitness {
    space: FiniteMetricSpace,
    y_label: Vec<usize>,
    ybar_label: Vec<usize>,
    grid: Vec<Vec<usize>>,
    y_factor: FiniteMetricSpace,
    ybar_factor: FiniteMetricSpace,
    tol: Tolerance,
}

/// Reads the factor metrics off the fibers, rejecting label grids whose fibers
/// disagree about a factor distance by more than `tol.tol_metric`.
pub fn induced_factors(
    space: &FiniteMetricSpace,
    y_label: &[usize],
    ybar_label: &[usize],
    tol: &Tolerance,
) -> Result<(FiniteMetricSpace, FiniteMetricSpace), WitnessError> {
    let grid = build_grid(space.len(), y_label, ybar_label)?;
    factors_from_grid(space, &grid, tol)
}

fn build_grid(n: usize, y_label: &[usize], ybar_label: &[usize]) -> Result<Vec<Vec<usize>>, WitnessError> {
    if y_label.len() != n || ybar_label.len() != n {
        return Err(WitnessError::Length { n, y: y_label.len(), ybar: ybar_label.len() });
    }
    let ny = y_label.iter().max().map_or(0, |m| m + 1);
    let nb = ybar_label.iter().max().map_or(0, |m| m + 1);
    if ny * nb != n {
        return Err(WitnessError::GridSize { n, ny, nb });
    }
    let mut grid = vec![vec![usize::MAX; nb]; ny];
    for p in 0..n {
        let (i, j) = (y_label[p], ybar_label[p]);
        if grid[i][j] != usize::MAX {
            return Err(WitnessError::Duplicate { i, j, first: grid[i][j], second: p });
        }
        grid[i][j] = p;
    }
    Ok(grid)
}

fn factors_from_grid(
    space: &FiniteMetricSpace,
    grid: &[Vec<usize>],
    tol: &Tolerance,
) -> Result<(FiniteMetricSpace, FiniteMetricSpace), WitnessError> {
    let ny = grid.len();
    let nb = grid.first().map_or(0, |r| r.len());
    let mut dy = DMatrix::zeros(ny, ny);
    for a in 0..ny {
        for b in 0..ny {
            let first = space.d(grid[a][0], grid[b][0]);
            dy[(a, b)] = first;
            for (&p, &q) in grid[a].iter().zip(&grid[b]).skip(1) {
                let second = space.d(p, q);
                if (second - first).abs() > tol.tol_metric {
                    return Err(WitnessError::InconsistentFactor { side: Side::Y, a, b, first, second });
                }
            }
        }
    }
    let mut db = DMatrix::zeros(nb, nb);
    for a in 0..nb {
        for b in 0..nb {
            let first = space.d(grid[0][a], grid[0][b]);
            db[(a, b)] = first;
            for row in grid.iter().skip(1) {
                let second = space.d(row[a], row[b]);
                if (second - first).abs() > tol.tol_metric {
                    return Err(WitnessError::InconsistentFactor { side: Side::YBar, a, b, first, second });
                }
            }
        }
    }
    let ylabels = (0..ny).map(|i| space.label(grid[i][0]).to_string()).collect();
    let blabels = (0..nb).map(|j| space.label(grid[0][j]).to_string()).collect();
    let y = FiniteMetricSpace::new(ylabels, dy).expect("square factor");
    let b = FiniteMetricSpace::new(blabels, db).expect("square factor");
    Ok((y, b))
}

impl ProductWitness {
    pub fn new(space: FiniteMetricSpace, y_label: Vec<usize>, ybar_label: Vec<usize>) -> Result<Self, WitnessError> {
        let tol = Tolerance::for_space(&space);
        Self::with_tolerance(space, y_label, ybar_label, tol)
    }

    pub fn with_tolerance(
        space: FiniteMetricSpace,
        y_label: Vec<usize>,
        ybar_label: Vec<usize>,
        tol: Tolerance,
    ) -> Result<Self, WitnessError> {
        let grid = build_grid(space.len(), &y_label, &ybar_label)?;
        let (y_factor, ybar_factor) = factors_from_grid(&space, &grid, &tol)?;
        let w = Self { space, y_label, ybar_label, grid, y_factor, ybar_factor, tol };
        if let Some((x, z, residual)) = w.worst_pythagoras() {
            if residual > tol.tol_sq {
                return Err(WitnessError::Pythagoras { x, z, residual });
            }
        }
        Ok(w)
    }

    /// The witness `X = X × {pt}` (every point gets `Ȳ`-coordinate 0).
    pub fn trivial(space: FiniteMetricSpace) -> Self {
        let n = space.len();
        Self::new(space, (0..n).collect(), vec![0; n]).expect("trivial witness is valid")
    }

    /// The coordinate witness of `product(y, z)` as built by [`crate::metric::product`].
    pub fn of_product(y: &FiniteMetricSpace, z: &FiniteMetricSpace) -> Self {
        let space = crate::metric::product(y, z);
        let nz = z.len();
        let n = space.len();
        Self::new(space, (0..n).map(|p| p / nz).collect(), (0..n).map(|p| p % nz).collect())
            .expect("coordinate witness of a product is valid")
    }

    /// Largest Pythagorean residual `|d²(x,z) − d_Y² − d_Ȳ²|` over all pairs.
    pub fn worst_pythagoras(&self) -> Option<(usize, usize, f64)> {
        let n = self.space.len();
        let mut worst: Option<(usize, usize, f64)> = None;
        for x in 0..n {
            for z in x + 1..n {
                let r = (self.space.sq(x, z)
                    - self.y_factor.sq(self.y_label[x], self.y_label[z])
                    - self.ybar_factor.sq(self.ybar_label[x], self.ybar_label[z]))
                .abs();
                if worst.is_none_or(|(_, _, w)| r > w) {
                    worst = Some((x, z, r));
                }
            }
        }
        worst
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn y_label(&self) -> &[usize] {
        &self.y_label
    }

    pub fn ybar_label(&self) -> &[usize] {
        &self.ybar_label
    }

    pub fn y_factor(&self) -> &FiniteMetricSpace {
        &self.y_factor
    }

    pub fn ybar_factor(&self) -> &FiniteMetricSpace {
        &self.ybar_factor
    }

    /// `(Y, Ȳ)` with metrics read off the fibers.
    pub fn induced_factors(&self) -> (FiniteMetricSpace, FiniteMetricSpace) {
        (self.y_factor.clone(), self.ybar_factor.clone())
    }

    /// Point with coordinates `(i, j)`.
    pub fn point_at(&self, i: usize, j: usize) -> usize {
        self.grid[i][j]
    }

    pub fn is_trivial(&self) -> bool {
        self.y_factor.len() <= 1 || self.ybar_factor.len() <= 1
    }

    /// `Y_x`: the points sharing `x`'s `Ȳ`-coordinate, ordered by `Y`-coordinate.
    pub fn y_fiber(&self, x: usize) -> Vec<usize> {
        let j = self.ybar_label[x];
        self.grid.iter().map(|row| row[j]).collect()
    }

    /// `Ȳ_x`: the points sharing `x`'s `Y`-coordinate.
    pub fn ybar_fiber(&self, x: usize) -> Vec<usize> {
        self.grid[self.y_label[x]].clone()
    }

    /// The same decomposition read as `Ȳ × Y`.
    pub fn swapped(&self) -> Self {
        Self::with_tolerance(self.space.clone(), self.ybar_label.clone(), self.y_label.clone(), self.tol)
            .expect("swap preserves validity")
    }

    /// Relabels coordinates by first occurrence and orders the two factors so
    /// that the pair of label vectors is lexicographically minimal.
    pub fn canonical(&self) -> Self {
        let y = renumber(&self.y_label);
        let b = renumber(&self.ybar_label);
        let (y, b) = if (&b, &y) < (&y, &b) { (b, y) } else { (y, b) };
        Self::with_tolerance(self.space.clone(), y, b, self.tol).expect("relabeling preserves validity")
    }

    /// Key identifying the decomposition up to swap and renumbering.
    pub fn canonical_key(&self) -> (Vec<usize>, Vec<usize>) {
        let y = renumber(&self.y_label);
        let b = renumber(&self.ybar_label);
        if (&b, &y) < (&y, &b) {
            (b, y)
        } else {
            (y, b)
        }
    }

    pub fn to_labels(&self) -> WitnessLabels {
        let mut y_label = BTreeMap::new();
        let mut ybar_label = BTreeMap::new();
        for p in 0..self.space.len() {
            y_label.insert(self.space.label(p).to_string(), self.y_label[p]);
            ybar_label.insert(self.space.label(p).to_string(), self.ybar_label[p]);
        }
        WitnessLabels { y_label, ybar_label }
    }

    pub fn from_labels(space: FiniteMetricSpace, labels: &WitnessLabels) -> Result<Self, WitnessError> {
        let n = space.len();
        let mut y = vec![0; n];
        let mut b = vec![0; n];
        for (p, label) in space.labels().iter().enumerate() {
            y[p] = *labels.y_label.get(label).ok_or_else(|| WitnessError::UnknownLabel(label.clone()))?;
            b[p] = *labels.ybar_label.get(label).ok_or_else(|| WitnessError::UnknownLabel(label.clone()))?;
        }
        for l in labels.y_label.keys().chain(labels.ybar_label.keys()) {
            if space.index_of(l).is_none() {
                return Err(WitnessError::UnknownLabel(l.clone()));
            }
        }
        Self::new(space, y, b)
    }
}

fn renumber(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// JSON form `{"y_label": {label: index}, "ybar_label": {label: index}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessLabels {
    pub y_label: BTreeMap<String, usize>,
    pub ybar_label: BTreeMap<String, usize>,
}

/// A covering of the space by fibers `Y_i` with matchings `P_ij : Y_i → Y_j`.
///
/// `matchings[i][j][p] = q` means `P_ij` sends the `p`-th point of fiber `i`
/// to the `q`-th point of fiber `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSystem {
    fibers: Vec<Vec<usize>>,
    matchings: Vec<Vec<Vec<usize>>>,
}

impl FiberSystem {
    pub fn new(fibers: Vec<Vec<usize>>, matchings: Vec<Vec<Vec<usize>>>) -> Result<Self, FiberError> {
        let m = fibers.len();
        if m == 0 {
            return Err(FiberError::Empty);
        }
        let s = fibers[0].len();
        for (f, fib) in fibers.iter().enumerate() {
            if fib.len() != s {
                return Err(FiberError::FiberSize { fiber: f, expected: s, found: fib.len() });
            }
        }
        if matchings.len() != m {
            return Err(FiberError::NotBijective { i: matchings.len().min(m), j: 0 });
        }
        for (i, row) in matchings.iter().enumerate() {
            if row.len() != m {
                return Err(FiberError::NotBijective { i, j: row.len().min(m) });
            }
            for (j, map) in row.iter().enumerate() {
                let mut seen = vec![false; s];
                if map.len() != s {
                    return Err(FiberError::NotBijective { i, j });
                }
                for &q in map {
                    if q >= s || seen[q] {
                        return Err(FiberError::NotBijective { i, j });
                    }
                    seen[q] = true;
                }
            }
        }
        Ok(Self { fibers, matchings })
    }

    /// Fibers listed in matching order: `P_ij` sends position `p` to position `p`.
    pub fn aligned(fibers: Vec<Vec<usize>>) -> Result<Self, FiberError> {
        let m = fibers.len();
        let s = fibers.first().map_or(0, |f| f.len());
        let identity: Vec<usize> = (0..s).collect();
        Self::new(fibers, vec![vec![identity; m]; m])
    }

    /// The `Y`-fibers of a witness, aligned by `Y`-coordinate.
    pub fn from_witness(w: &ProductWitness) -> Self {
        let nb = w.ybar_factor().len();
        let fibers = (0..nb).map(|j| w.y_fiber(w.point_at(0, j))).collect();
        Self::aligned(fibers).expect("witness fibers are aligned")
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    /// Point image of the `p`-th point of fiber `i` under `P_ij`.
    fn image(&self, i: usize, j: usize, p: usize) -> usize {
        self.fibers[j][self.matchings[i][j][p]]
    }
}

/// Recognizes `X = Y_o × J` from an equidistant fiber family.
///
/// Checks the composition law, the Pythagorean condition, and that
/// `d(x, P_ij(x))` does not depend on `x`; identifies fibers at base distance
/// 0 (within `tol.tol_metric`); and returns the witness whose `Y`-factor is a
/// reference fiber and whose `Ȳ`-factor is the base `J`.
pub fn assemble_from_fibers(
    space: &FiniteMetricSpace,
    fs: &FiberSystem,
    tol: &Tolerance,
) -> Result<ProductWitness, FiberError> {
    let n = space.len();
    let m = fs.fibers.len();
    let s = fs.fibers[0].len();

    let mut covered = vec![false; n];
    for fib in &fs.fibers {
        for &p in fib {
            covered[p] = true;
        }
    }
    if let Some(p) = covered.iter().position(|c| !c) {
        return Err(FiberError::Uncovered(p));
    }

    for i in 0..m {
        for j in 0..m {
            for p in 0..s {
                if fs.matchings[j][i][fs.matchings[i][j][p]] != p {
                    return Err(FiberError::Composition { i, j, k: i, position: p });
                }
            }
            for k in 0..m {
                for p in 0..s {
                    if fs.matchings[j][k][fs.matchings[i][j][p]] != fs.matchings[i][k][p] {
                        return Err(FiberError::Composition { i, j, k, position: p });
                    }
                }
            }
        }
    }

    let mut worst: Option<FiberError> = None;
    let mut worst_r = tol.tol_sq;
    for i in 0..m {
        for j in 0..m {
            for p in 0..s {
                let x = fs.fibers[i][p];
                let px = fs.image(i, j, p);
                for &xbar in &fs.fibers[j] {
                    let r = (space.sq(x, xbar) - space.sq(x, px) - space.sq(px, xbar)).abs();
                    if r > worst_r {
                        worst_r = r;
                        worst = Some(FiberError::Pythagoras { i, j, x, xbar, residual: r });
                    }
                }
            }
        }
    }
    if let Some(e) = worst {
        return Err(e);
    }

    let mut base = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let d0 = space.d(fs.fibers[i][0], fs.image(i, j, 0));
            for p in 1..s {
                let x = fs.fibers[i][p];
                let spread = (space.d(x, fs.image(i, j, p)) - d0).abs();
                if spread > tol.tol_metric {
                    return Err(FiberError::NotEquidistant { i, j, x, spread });
                }
            }
            base[(i, j)] = d0;
        }
    }

    // Identify fibers at base distance 0; they must be the same subset.
    let mut group = vec![usize::MAX; m];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..m {
        if let Some(g) = reps.iter().position(|&r| base[(r, i)] <= tol.tol_metric) {
            let r = reps[g];
            if (0..s).any(|p| fs.image(r, i, p) != fs.fibers[r][p]) {
                return Err(FiberError::Overlap { i: r, j: i });
            }
            group[i] = g;
        } else {
            group[i] = reps.len();
            reps.push(i);
        }
    }

    let o = reps[0];
    let mut y_label = vec![usize::MAX; n];
    let mut ybar_label = vec![usize::MAX; n];
    for (g, &r) in reps.iter().enumerate() {
        for p in 0..s {
            let x = fs.fibers[r][p];
            if ybar_label[x] != usize::MAX {
                return Err(FiberError::Overlap { i: reps[ybar_label[x]], j: r });
            }
            ybar_label[x] = g;
            y_label[x] = fs.matchings[r][o][p];
        }
    }
    Ok(ProductWitness::with_tolerance(space.clone(), y_label, ybar_label, *tol)?)
}

fn same_space(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
    a.labels() == b.labels() && a.dist() == b.dist()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterbaseReport {
    pub pass: bool,
    pub worst_residual: f64,
    /// `(p, q)` attaining the worst residual.
    pub argmax: Option<(usize, usize)>,
    pub pairs_checked: usize,
}

/// For `F_x = Y_x ∩ Z_x`, checks that for every `p ∈ Ȳ_x`, `q ∈ F_x`:
/// `d²(Pᶻp, Pᶻq) = d²(Pᶻp, Pᶻx) + d²(Pᶻx, Pᶻq)`.
///
/// `w1` realizes `Y × Ȳ` and `w2` realizes `Z × Z̄`.
pub fn check_interbase(w1: &ProductWitness, w2: &ProductWitness, x: usize) -> Result<InterbaseReport, StructureError> {
    if !same_space(w1.space(), w2.space()) {
        return Err(StructureError::DifferentSpaces);
    }
    if x >= w1.space().len() {
        return Err(StructureError::PointOutOfRange(x));
    }
    let yx: BTreeSet<usize> = w1.y_fiber(x).into_iter().collect();
    let f_x: Vec<usize> = w2.y_fiber(x).into_iter().filter(|q| yx.contains(q)).collect();
    let z = w2.y_factor();
    let pz = w2.y_label();
    let mut worst = 0.0;
    let mut argmax = None;
    let mut count = 0;
    for p in w1.ybar_fiber(x) {
        for &q in &f_x {
            let r = (z.sq(pz[p], pz[q]) - z.sq(pz[p], pz[x]) - z.sq(pz[x], pz[q])).abs();
            count += 1;
            if r > worst || argmax.is_none() {
                worst = r;
                argmax = Some((p, q));
            }
        }
    }
    Ok(InterbaseReport {
        pass: worst <= w2.tolerance().tol_sq,
        worst_residual: worst,
        argmax,
        pairs_checked: count,
    })
}

/// The slopes `(a, ā)` of the segment `[x, z]` with respect to `Y` and `Ȳ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slope {
    pub a: f64,
    pub a_bar: f64,
}

impl Slope {
    /// `|a² + ā² − 1|`.
    pub fn residual(&self) -> f64 {
        (self.a * self.a + self.a_bar * self.a_bar - 1.0).abs()
    }
}

pub fn slope(w: &ProductWitness, x: usize, z: usize) -> Result<Slope, StructureError> {
    let n = w.space().len();
    if x >= n || z >= n {
        return Err(StructureError::PointOutOfRange(x.max(z)));
    }
    if x == z {
        return Err(StructureError::DegenerateSegment(x));
    }
    let d = w.space().d(x, z);
    let a = w.y_factor().d(w.y_label[x], w.y_label[z]) / d;
    let a_bar = w.ybar_factor().d(w.ybar_label[x], w.ybar_label[z]) / d;
    Ok(Slope { a, a_bar })
}

/// Whether `s = P^Y(s) × P^Ȳ(s)`.
pub fn is_rectangular(w: &ProductWitness, s: &[usize]) -> Result<bool, StructureError> {
    if s.is_empty() {
        return Err(StructureError::EmptySubset);
    }
    let set: BTreeSet<usize> = s.iter().cloned().collect();
    let ys: BTreeSet<usize> = set.iter().map(|&p| w.y_label[p]).collect();
    let bs: BTreeSet<usize> = set.iter().map(|&p| w.ybar_label[p]).collect();
    Ok(ys.len() * bs.len() == set.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyOReport {
    /// `F_x = Y_x ∩ Z_x`.
    pub f_x: Vec<usize>,
    /// `T = P^Y(F_x) × Ȳ` as a point set.
    pub t: Vec<usize>,
    /// `Pᶻ(T)` as `Z`-coordinates.
    pub image: Vec<usize>,
    /// `Pᶻ(T)` splits as `Pᶻ(F_x) × Pᶻ(Ȳ_x)`.
    pub splits: bool,
    /// `Pᶻ(T) = Z`.
    pub surjective: bool,
    /// `Z`-coordinates missed by `Pᶻ(T)`.
    pub missing: Vec<usize>,
}

impl PropertyOReport {
    pub fn pass(&self) -> bool {
        self.splits && self.surjective
    }
}

/// Builds `T = P^Y(F_x) × Ȳ` and checks that `Pᶻ(T)` splits as
/// `Pᶻ(F_x) × Pᶻ(Ȳ_x)` (by assembling the fiber family `{Pᶻ(F_p)}_{p ∈ T}`)
/// and that `Pᶻ(T)` is all of `Z`.
pub fn check_property_o(w_y: &ProductWitness, w_z: &ProductWitness, x: usize) -> Result<PropertyOReport, StructureError> {
    if !same_space(w_y.space(), w_z.space()) {
        return Err(StructureError::DifferentSpaces);
    }
    if x >= w_y.space().len() {
        return Err(StructureError::PointOutOfRange(x));
    }
    let fiber_meet = |p: usize| -> Vec<usize> {
        let yp: BTreeSet<usize> = w_y.y_fiber(p).into_iter().collect();
        w_z.y_fiber(p).into_iter().filter(|q| yp.contains(q)).collect()
    };
    let f_x = fiber_meet(x);
    let f_coords: Vec<usize> = f_x.iter().map(|&q| w_y.y_label()[q]).collect();
    let f_set: BTreeSet<usize> = f_coords.iter().cloned().collect();
    let n = w_y.space().len();
    let t: Vec<usize> = (0..n).filter(|&p| f_set.contains(&w_y.y_label()[p])).collect();

    let pz = w_z.y_label();
    let image: Vec<usize> = t.iter().map(|&p| pz[p]).collect::<BTreeSet<_>>().into_iter().collect();
    let pos: BTreeMap<usize, usize> = image.iter().enumerate().map(|(k, &z)| (z, k)).collect();
    let sub = w_z.y_factor().subspace(&image);

    // Align each F_p with F_x by Y-coordinate: the partner of f ∈ F_x in F_p
    // is the intersection of Ȳ_f with F_p.
    let mut fibers = Vec::with_capacity(t.len());
    for &p in &t {
        let f_p = fiber_meet(p);
        let mut aligned = Vec::with_capacity(f_x.len());
        for &c in &f_coords {
            let q = f_p.iter().find(|&&q| w_y.y_label()[q] == c).ok_or_else(|| {
                StructureError::Misaligned(format!("F_{p} has no point with Y-coordinate {c}"))
            })?;
            aligned.push(pos[&pz[*q]]);
        }
        if f_p.len() != f_x.len() {
            return Err(StructureError::Misaligned(format!("|F_{p}| = {} but |F_x| = {}", f_p.len(), f_x.len())));
        }
        fibers.push(aligned);
    }
    let fs = FiberSystem::aligned(fibers)?;
    let tol = Tolerance { tol_metric: w_z.tolerance().tol_metric, tol_sq: w_z.tolerance().tol_sq };
    let assembled = assemble_from_fibers(&sub, &fs, &tol)?;

    let base_through_x: BTreeSet<usize> = assembled.ybar_fiber(pos[&pz[x]]).into_iter().map(|k| image[k]).collect();
    let ybar_image: BTreeSet<usize> = w_y.ybar_fiber(x).into_iter().map(|p| pz[p]).collect();
    let splits = assembled.y_factor().len() == f_x.len() && base_through_x == ybar_image;

    let missing: Vec<usize> = (0..w_z.y_factor().len()).filter(|z| !pos.contains_key(z)).collect();
    Ok(PropertyOReport { f_x, t, image, splits, surjective: missing.is_empty(), missing })
}
