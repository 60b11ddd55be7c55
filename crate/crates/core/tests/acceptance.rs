mod common;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{
    brute_force, brute_isometries, fuzz_corpus, k2, key, normal, oracle_decomposable, planted_sum, random_gram,
    random_metric, shuffled, tol,
};
use derham::convex::gruber_decompose;
use derham::factorize::{enumerate_witnesses, factorize, verify_exact_sequence, Budget};
use derham::generate::{random_polytope_norm, rotated_euclidean_pair, shuffled_product, Instance};
use derham::linalg::Subspace;
use derham::loewner::{check_lemma_ellips, max_inscribed_ellipsoid};
use derham::metric::{product, product_all, FiniteMetricSpace};
use derham::norm::{coordinate_decompositions, NormedSpace};
use derham::product::{assemble_from_fibers, check_interbase, check_property_o, slope, FiberSystem, ProductWitness};
use derham::rigidity::{
    check_lemma_unique, check_strike, composed_projection_eigen, defect, defect_ratio, DefectOptions, ProjectionPair,
    RigidityError, StrikeOptions, StrikeVerdict,
};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn line(xs: &[f64]) -> Subspace {
    Subspace::span(xs.len(), &[v(xs)])
}

fn coord(n: usize, axes: &[usize]) -> Subspace {
    Subspace::coordinate(n, axes)
}

/// Every witness of the space in both orientations.
fn oriented_witnesses(s: &FiniteMetricSpace) -> Result<Vec<ProductWitness>, String> {
    let r = enumerate_witnesses(s, &tol(s), &Budget::default()).map_err(|e| e.to_string())?;
    require(r.complete, || format!("witness search on {} points ran out of budget", s.len()))?;
    Ok(r.witnesses.iter().flat_map(|w| [w.clone(), w.swapped()]).collect())
}

fn product_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for run in 0..100 {
        let (a, b) = (rng.random_range(1..=12), rng.random_range(1..=12));
        let (y, z) = (random_metric(&mut rng, a), random_metric(&mut rng, b));
        let x = product(&y, &z);
        for p in 0..x.len() {
            for q in 0..x.len() {
                let (i1, j1, i2, j2) = (p / b, p % b, q / b, q % b);
                let expected = (y.d(i1, i2).powi(2) + z.d(j1, j2).powi(2)).sqrt();
                require(x.d(p, q) == expected, || format!("pair {run}: d({p},{q}) = {} vs {expected}", x.d(p, q)))?;
            }
        }
    }
    let diag = product(&k2(3.0), &k2(4.0)).d(0, 3);
    require((diag - 5.0).abs() <= 1e-12, || format!("3-4-5 diagonal {diag}"))?;
    Ok("100 pairs exact, 3-4-5 diagonal = 5".into())
}

fn recognition() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = [rng.random_range(2..=4), rng.random_range(2..=4)];
        let Instance::ShuffledProduct { space, ground_truth } = shuffled_product(&sizes, seed).unwrap() else { unreachable!() };
        // Y-fibers grouped by the second coordinate; each listed in its own
        // random order, with matchings that respect the first coordinate.
        let mut fibers = Vec::new();
        let mut orders = Vec::new();
        for j in 0..sizes[1] {
            let mut order: Vec<usize> = (0..sizes[0]).collect();
            order.shuffle(&mut rng);
            let fiber: Vec<usize> = order
                .iter()
                .map(|&i| (0..space.len()).find(|&p| ground_truth.coordinates[p] == [i, j]).unwrap())
                .collect();
            fibers.push(fiber);
            orders.push(order);
        }
        let m = fibers.len();
        let matchings = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| orders[a].iter().map(|i| orders[b].iter().position(|x| x == i).unwrap()).collect())
                    .collect()
            })
            .collect();
        let fs = FiberSystem::new(fibers, matchings).map_err(|e| format!("seed {seed}: {e}"))?;
        let w = assemble_from_fibers(&space, &fs, &tol(&space)).map_err(|e| format!("seed {seed}: {e}"))?;
        let (fy, fb) = (w.y_factor(), w.ybar_factor());
        require(!brute_isometries(fb, &ground_truth.factors[1], &tol(fb)).is_empty(), || format!("seed {seed}: base not isometric"))?;
        require(!brute_isometries(fy, &ground_truth.factors[0], &tol(fy)).is_empty(), || format!("seed {seed}: fiber not isometric"))?;
        let (yl, bl) = (w.y_label(), w.ybar_label());
        for p in 0..space.len() {
            for q in 0..space.len() {
                let d = (fy.sq(yl[p], yl[q]) + fb.sq(bl[p], bl[q])).sqrt();
                worst = worst.max((d - space.d(p, q)).abs());
            }
        }
    }
    require(worst <= 1e-9, || format!("distance residual {worst:.3e}"))?;
    Ok(format!("100 shuffled products, residual {worst:.1e}"))
}

fn completeness() -> Outcome {
    let mut count = 0;
    for s in fuzz_corpus().iter().filter(|s| s.len() <= 12) {
        let r = enumerate_witnesses(s, &tol(s), &Budget::default()).map_err(|e| e.to_string())?;
        require(r.complete, || format!("{} points: incomplete", s.len()))?;
        let found: BTreeSet<_> = r.witnesses.iter().map(|w| key(w.y_label(), w.ybar_label())).collect();
        require(found == brute_force(s), || format!("{} points: search and oracle differ", s.len()))?;
        count += 1;
    }
    Ok(format!("{count} spaces agree with the oracle"))
}

fn slopes() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for s in &fuzz_corpus() {
        let ws = oriented_witnesses(s)?;
        for w in &ws {
            for x in 0..s.len() {
                for z in 0..s.len() {
                    if x != z {
                        worst = worst.max(slope(w, x, z).map_err(|e| e.to_string())?.residual());
                    }
                }
            }
            let (ny, nb) = (w.y_factor().len(), w.ybar_factor().len());
            for w2 in &ws {
                for y1 in 0..ny {
                    for y2 in y1 + 1..ny {
                        let at = |b| slope(w2, w.point_at(y1, b), w.point_at(y2, b)).unwrap();
                        let first = at(0);
                        for b in 1..nb {
                            require(at(b) == first, || format!("{} points: slope differs across placements", s.len()))?;
                            compared += 1;
                        }
                    }
                }
            }
        }
    }
    require(worst <= 1e-9, || format!("a² + ā² residual {worst:.3e}"))?;
    Ok(format!("residual {worst:.1e}, {compared} parallel placements equal"))
}

fn interbase() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for s in &fuzz_corpus() {
        let ws = oriented_witnesses(s)?;
        if ws.len() < 4 {
            continue;
        }
        instances += 1;
        for w1 in &ws {
            for w2 in &ws {
                for x in 0..s.len() {
                    let r = check_interbase(w1, w2, x).map_err(|e| e.to_string())?;
                    worst = worst.max(r.worst_residual);
                    let o = check_property_o(w1, w2, x).map_err(|e| format!("{} points, x = {x}: {e}", s.len()))?;
                    require(o.pass(), || format!("{} points, x = {x}: property O fails: {o:?}", s.len()))?;
                }
            }
        }
    }
    require(worst <= 1e-9, || format!("interbase residual {worst:.3e}"))?;
    Ok(format!("{instances} spaces with several decompositions, residual {worst:.1e}"))
}

fn isometry_groups() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tri = FiniteMetricSpace::triangle(1.0, 1.0, 1.0);
    let mut cases: Vec<Vec<FiniteMetricSpace>> = Vec::new();
    let f3 = random_metric(&mut rng, 3);
    let f4 = random_metric(&mut rng, 4);
    let f2 = random_metric(&mut rng, 2);
    cases.push(vec![f3.clone(), f3.clone()]);
    cases.push(vec![f4.clone(), f4.clone()]);
    cases.push(vec![f2.clone(), f2, random_metric(&mut rng, 3)]);
    cases.push(vec![k2(1.0), k2(1.0), k2(1.0)]);
    cases.push(vec![tri.clone(), tri.clone()]);
    cases.push(vec![k2(1.0), k2(1.0), f3]);
    cases.push(vec![k2(1.0), tri]);
    while cases.len() < 20 {
        let a = rng.random_range(2..=4);
        let b = rng.random_range(2..=3);
        cases.push(vec![random_metric(&mut rng, a), random_metric(&mut rng, b)]);
    }
    let budget = Budget::default();
    let mut repeated = 0;
    for (k, factors) in cases.iter().enumerate() {
        let s = shuffled(&mut rng, &product_all(factors));
        let t = tol(&s);
        let iso = |a: &FiniteMetricSpace, b: &FiniteMetricSpace| brute_isometries(a, b, &tol(a));
        let group = iso(&s, &s);
        let factor_orders: usize = factors.iter().map(|f| iso(f, f).len()).product();
        let n = factors.len();
        let mut perms = 0;
        let mut idx: Vec<usize> = (0..n).collect();
        permutations(&mut idx, 0, &mut |p| {
            if (0..n).all(|i| !iso(&factors[i], &factors[p[i]]).is_empty()) {
                perms += 1;
            }
        });
        if perms > 1 {
            repeated += 1;
        }
        require(group.len() == factor_orders * perms, || format!("case {k}: |Iso| = {} ≠ {factor_orders}·{perms}", group.len()))?;

        let f = factorize(&s, &t, &budget).map_err(|e| e.to_string())?;
        let g = verify_exact_sequence(&s, &f, &t, &budget).map_err(|e| e.to_string())?;
        require(g.order == group.len() && g.factor_group_order == factor_orders && g.permutation_group_order == perms, || {
            format!("case {k}: reported {}/{}/{} vs {}/{factor_orders}/{perms}", g.order, g.factor_group_order, g.permutation_group_order, group.len())
        })?;
        require(g.exact && g.kernel_trivial, || format!("case {k}: sequence reported not exact"))?;

        // Kernel: isometries fixing every factor fiber through the base point.
        let base = &f.coordinates[f.base_point];
        let on_fibers: Vec<usize> = (0..s.len())
            .filter(|&p| (0..f.factors.len()).any(|i| (0..f.factors.len()).all(|j| j == i || f.coordinates[p][j] == base[j])))
            .collect();
        let kernel = group.iter().filter(|g| on_fibers.iter().all(|&p| g[p] == p)).count();
        require(kernel == 1, || format!("case {k}: kernel of order {kernel}"))?;
    }
    require(repeated >= 5, || format!("only {repeated} cases with repeated factors"))?;
    Ok(format!("20 products ({repeated} with repeated factors), kernels trivial"))
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn gruber() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut parts = 0;
    for inst in 0..100 {
        let (body, s1, s2) = planted_sum(&mut rng);
        let n = s1.ambient_dim();
        let d = gruber_decompose(&body, None);
        require(!d.partial && !d.ambiguous && d.parts.len() >= 2, || format!("instance {inst}: planted split missed"))?;
        let (mut in1, mut in2) = (Subspace::zero(n), Subspace::zero(n));
        for p in &d.parts {
            if s1.contains_subspace(&p.subspace) {
                in1 = in1.sum(&p.subspace);
            } else if s2.contains_subspace(&p.subspace) {
                in2 = in2.sum(&p.subspace);
            } else {
                return Err(format!("instance {inst}: part straddles the planted factors"));
            }
            require(p.indecomposable != oracle_decomposable(&p.body), || format!("instance {inst}: certificate disagrees with oracle"))?;
            parts += 1;
        }
        require(in1.same_as(&s1) && in2.same_as(&s2), || format!("instance {inst}: parts do not regroup"))?;
    }
    Ok(format!("100 planted sums, {parts} parts certified"))
}

fn random_factor(rng: &mut ChaCha8Rng, d: usize) -> NormedSpace {
    match rng.random_range(0..4) {
        0 => NormedSpace::linf(d),
        1 => NormedSpace::l1(d),
        2 => NormedSpace::p_norm(4.0, d).unwrap(),
        _ => NormedSpace::gram(random_gram(rng, d)).unwrap(),
    }
}

fn loewner() -> Outcome {
    for d in 2..=4 {
        let shape = max_inscribed_ellipsoid(&NormedSpace::linf(d)).map_err(|e| e.to_string())?.ellipsoid.shape;
        let err = (shape - DMatrix::identity(d, d)).amax();
        require(err <= 1e-6, || format!("cube in dimension {d}: error {err:.3e}"))?;
    }
    let shape = max_inscribed_ellipsoid(&NormedSpace::l1(2)).map_err(|e| e.to_string())?.ellipsoid.shape;
    let radius = 1.0 / shape.clone().symmetric_eigen().eigenvalues.max().sqrt();
    require((radius - 1.0 / SQRT_2).abs() <= 1e-6 && (&shape - DMatrix::identity(2, 2) * 2.0).amax() <= 1e-6, || {
        format!("ℓ1 disk radius {radius}")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let d1 = rng.random_range(1..=3);
        let d2 = rng.random_range(1..=(6 - d1).min(3));
        let d = d1 + d2;
        let s = NormedSpace::product_of(vec![random_factor(&mut rng, d1), random_factor(&mut rng, d2)]);
        let (mut a, mut b) = (coord(d, &(0..d1).collect::<Vec<_>>()), coord(d, &(d1..d).collect::<Vec<_>>()));
        let s = if k % 2 == 1 {
            let t = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 } + 0.3 * normal(&mut rng) / (d as f64).sqrt());
            a = a.transform(&t);
            b = b.transform(&t);
            s.distorted(&t).unwrap()
        } else {
            s
        };
        let r = check_lemma_ellips(&s, &a, &b, 1e-5).map_err(|e| format!("instance {k}: {e}"))?;
        worst = worst.max(r.off_block);
    }
    require(worst <= 1e-5, || format!("off-block entry {worst:.3e}"))?;
    Ok(format!("cube and ℓ1 disk exact, 50 products off-block ≤ {worst:.1e}"))
}

fn defect_bounds() -> Outcome {
    let opts = |seed| DefectOptions { seed, ..DefectOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in 1..=5 {
        let m = defect(&NormedSpace::gram(random_gram(&mut rng, d)).unwrap(), &opts(d as u64)).m_value;
        require((1.0..=1.0 + 1e-9).contains(&m), || format!("gram space in dimension {d}: {m}"))?;
    }
    let stated = [
        (NormedSpace::linf(2), v(&[1.0, 1.0]), v(&[1.0, -1.0])),
        (NormedSpace::l1(2), v(&[1.0, 0.0]), v(&[0.0, 1.0])),
    ];
    for (s, x, y) in &stated {
        let m = defect(s, &opts(0)).m_value;
        let at = defect_ratio(s, x, y).unwrap();
        require((m - SQRT_2).abs() <= 1e-6 && (at - SQRT_2).abs() <= 1e-6, || format!("m = {m}, stated pair {at}"))?;
    }
    let mut corpus = vec![
        NormedSpace::p_norm(1.5, 3).unwrap(),
        NormedSpace::p_norm(3.0, 2).unwrap(),
        NormedSpace::p_norm(7.0, 3).unwrap(),
        NormedSpace::linf(3),
        NormedSpace::l1(3),
        NormedSpace::product_of(vec![NormedSpace::linf(2), NormedSpace::l1(1)]),
        NormedSpace::product_of(vec![NormedSpace::l1(2), NormedSpace::euclidean(1)]),
        NormedSpace::l1(3).distorted(&(DMatrix::identity(3, 3) + DMatrix::from_fn(3, 3, |_, _| 0.2 * normal(&mut rng)))).unwrap(),
    ];
    for seed in 0..4 {
        if let Instance::RandomPolytopeNorm { norm, .. } = random_polytope_norm(3, 6, seed).unwrap() {
            corpus.push(norm);
        }
    }
    let mut worst: f64 = 0.0;
    for s in &corpus {
        let d = s.dim();
        worst = worst.max(defect(s, &opts(5)).m_value);
        for _ in 0..2000 {
            let x = DVector::from_fn(d, |_, _| normal(&mut rng));
            let y = DVector::from_fn(d, |_, _| normal(&mut rng));
            worst = worst.max(defect_ratio(s, &x, &y).unwrap());
        }
    }
    require(worst <= SQRT_2 + 1e-12, || format!("bound violated: {worst}"))?;
    Ok(format!("gram = 1, ℓ∞²/ℓ1² = √2, corpus max {worst:.6}"))
}

fn planar(theta: f64) -> ProjectionPair {
    let (c, s) = (theta.cos(), theta.sin());
    ProjectionPair::new(NormedSpace::euclidean(2), line(&[1.0, 0.0]), line(&[0.0, 1.0]), line(&[c, s]), line(&[-s, c])).unwrap()
}

fn eigen() -> Outcome {
    let mut pairs = Vec::new();
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let pp = planar(theta);
        let r = composed_projection_eigen(&pp, 0).map_err(|e| e.to_string())?;
        let err = (r.lambda - theta.cos().powi(2)).abs();
        require(err <= 1e-8, || format!("θ = {theta}: λ error {err:.3e}"))?;
        pairs.push((pp, r));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let d = 2 * rng.random_range(1..=3);
        let g = random_gram(&mut rng, d);
        let half = |rng: &mut ChaCha8Rng| {
            let s = Subspace::span_of(&DMatrix::from_fn(d, d / 2, |_, _| normal(rng)));
            let c = s.complement(&g);
            (s, c)
        };
        let ((a, abar), (b, bbar)) = (half(&mut rng), half(&mut rng));
        let pp = ProjectionPair::new(NormedSpace::gram(g.clone()).unwrap(), a, abar, b, bbar).unwrap();
        let r = composed_projection_eigen(&pp, 0).map_err(|e| e.to_string())?;
        pairs.push((pp, r));
    }
    let mut worst: f64 = 0.0;
    for (pp, r) in &pairs {
        let a = DVector::from_column_slice(&r.vector);
        let lhs = pp.space.eval(&(pp.p_b() * &a));
        worst = worst.max((lhs - r.lambda.sqrt() * pp.space.eval(&a)).abs());
        require(r.lambda > 0.0 && r.lambda < 1.0, || format!("λ = {} outside (0, 1)", r.lambda))?;
    }
    require(worst <= 1e-8, || format!("‖P^B a‖ residual {worst:.3e}"))?;
    Ok(format!("λ = cos²θ, ‖P^B a‖ residual {worst:.1e} on {} pairs", pairs.len()))
}

fn rotated_r4(theta: f64) -> ProjectionPair {
    let (c, s) = (theta.cos(), theta.sin());
    let b = Subspace::from_vectors(4, &[vec![c, 0.0, s, 0.0], vec![0.0, c, 0.0, s]]).unwrap();
    let bbar = Subspace::from_vectors(4, &[vec![-s, 0.0, c, 0.0], vec![0.0, -s, 0.0, c]]).unwrap();
    ProjectionPair::new(NormedSpace::euclidean(4), coord(4, &[0, 1]), coord(4, &[2, 3]), b, bbar).unwrap()
}

fn unique() -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [0.5f64, 0.75] {
        let r = check_lemma_unique(&rotated_r4(lambda.sqrt().acos()), lambda, 512, 1).map_err(|e| e.to_string())?;
        require(r.samples == 512 && r.identity_holds && r.euclidean, || format!("λ = {lambda}: {r:?}"))?;
        worst = worst.max(r.ambient_residual).max(r.reduced_residual);
    }
    require(worst <= 1e-8, || format!("identity residual {worst:.3e}"))?;
    let l4 = NormedSpace::p_norm(4.0, 2).unwrap();
    let pp = ProjectionPair::new(l4, line(&[1.0, 0.0]), line(&[0.0, 1.0]), line(&[1.0, 1.0]), line(&[1.0, -1.0])).unwrap();
    let r = check_lemma_unique(&pp, 0.5, 512, 1).map_err(|e| e.to_string())?;
    require(!r.identity_holds, || "ℓ4² control passed the identity".into())?;
    Ok(format!("residual {worst:.1e}; ℓ4² violation {:.3}", r.ambient_residual))
}

fn strike() -> Outcome {
    for seed in 0..100u64 {
        let dim = if seed % 2 == 0 { 4 } else { 6 };
        let Instance::RotatedEuclideanPair { norm, ground_truth: t } = rotated_euclidean_pair(dim, seed).unwrap() else { unreachable!() };
        let pp = ProjectionPair::new(norm, t.a, t.abar, t.b, t.bbar).map_err(|e| e.to_string())?;
        let opts = StrikeOptions { defect: DefectOptions { seed, ..DefectOptions::default() }, ..StrikeOptions::default() };
        match check_strike(&pp, &opts).map_err(|e| format!("seed {seed}: {e}"))? {
            StrikeVerdict::EuclideanConfirmed { .. } => {}
            other => return Err(format!("seed {seed}: {other:?}")),
        }
    }
    let mut refused = 0;
    let linf = NormedSpace::linf(4);
    let splits: Vec<(Subspace, Subspace)> = (1..15usize)
        .map(|mask| {
            let first: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let second: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 0).collect();
            (coord(4, &first), coord(4, &second))
        })
        .collect();
    let squares = NormedSpace::product_of(vec![NormedSpace::linf(2), NormedSpace::linf(2)]);
    let found = coordinate_decompositions(&squares, 256, 0);
    let mut candidates: Vec<(usize, NormedSpace, (Subspace, Subspace))> = splits.into_iter().map(|s| (0, linf.clone(), s)).collect();
    candidates.extend(found.iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (b.clone(), a.clone())]).map(|s| (1, squares.clone(), s)));
    for (g, space, (a, abar)) in &candidates {
        for (h, _, (b, bbar)) in &candidates {
            if g != h {
                continue;
            }
            let pp = ProjectionPair::new(space.clone(), a.clone(), abar.clone(), b.clone(), bbar.clone()).unwrap();
            match check_strike(&pp, &StrikeOptions::default()) {
                Err(RigidityError::NotTransversal(_)) => refused += 1,
                other => return Err(format!("coordinate pair not refused: {other:?}")),
            }
        }
    }
    Ok(format!("100 instances confirmed, {refused} ℓ∞-style pairs refused"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("product law", product_law),
        ("recognition from fibers", recognition),
        ("factorizer completeness", completeness),
        ("slopes", slopes),
        ("interbase and property O", interbase),
        ("isometry groups", isometry_groups),
        ("convex direct sums", gruber),
        ("inscribed ellipsoid", loewner),
        ("parallelogram defect", defect_bounds),
        ("eigenvector", eigen),
        ("generalized parallelogram identity", unique),
        ("transversal decompositions", strike),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
