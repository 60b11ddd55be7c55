use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, SQRT_2};

use derham::linalg::Subspace;
use derham::norm::{coordinate_decompositions, NormedSpace};
use derham::rigidity::{
    check_lemma_unique, check_maininter_unbound, check_strike, composed_projection_eigen, defect, defect_ratio,
    extremal_rectangularity, DefectOptions, ProjectionPair, RigidityError, StrikeOptions, StrikeVerdict,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
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

fn random_gram(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 } + 0.4 * normal(rng));
    a.transpose() * a
}

fn opts(seed: u64) -> DefectOptions {
    DefectOptions { seed, ..DefectOptions::default() }
}

#[test]
fn gram_spaces_have_defect_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in 1..=5 {
        let s = NormedSpace::gram(random_gram(&mut rng, d)).unwrap();
        let r = defect(&s, &opts(d as u64));
        assert!(r.m_value >= 1.0 && r.m_value <= 1.0 + 1e-9, "{}", r.m_value);
    }
}

#[test]
fn cube_and_cross_polytope_attain_sqrt2_at_stated_pairs() {
    let linf = NormedSpace::linf(2);
    let l1 = NormedSpace::l1(2);
    assert!((defect_ratio(&linf, &v(&[1.0, 1.0]), &v(&[1.0, -1.0])).unwrap() - SQRT_2).abs() < 1e-15);
    assert!((defect_ratio(&l1, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap() - SQRT_2).abs() < 1e-15);
    for s in [linf, l1] {
        let r = defect(&s, &opts(0));
        assert!((r.m_value - SQRT_2).abs() < 1e-6);
        let (x, y) = (v(&r.extremal_pair.0), v(&r.extremal_pair.1));
        assert!((defect_ratio(&s, &x, &y).unwrap() - r.m_value).abs() < 1e-9);
        assert!(r.certified_global);
    }
}

#[test]
fn lp_spaces_are_detected_non_euclidean() {
    for p in [1.0, 4.0, f64::INFINITY] {
        for d in [2, 3] {
            let r = defect(&NormedSpace::p_norm(p, d).unwrap(), &opts(3));
            assert!(r.m_value > 1.0 + 1e-3, "p = {p}, d = {d}: {}", r.m_value);
        }
    }
}

#[test]
fn defect_ratio_never_exceeds_sqrt2() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let spaces = [
        NormedSpace::linf(3),
        NormedSpace::l1(3),
        NormedSpace::p_norm(1.5, 3).unwrap(),
        NormedSpace::p_norm(7.0, 3).unwrap(),
        NormedSpace::product_of(vec![NormedSpace::linf(2), NormedSpace::l1(1)]),
        NormedSpace::gram(random_gram(&mut rng, 3)).unwrap(),
    ];
    for s in &spaces {
        for _ in 0..2000 {
            let x = DVector::from_fn(3, |_, _| normal(&mut rng));
            let y = DVector::from_fn(3, |_, _| normal(&mut rng));
            assert!(defect_ratio(s, &x, &y).unwrap() <= SQRT_2 + 1e-12);
        }
        assert!(defect(s, &opts(5)).m_value <= SQRT_2 + 1e-12);
    }
}

#[test]
fn defect_is_invariant_under_scaling() {
    for s in [NormedSpace::p_norm(3.0, 2).unwrap(), NormedSpace::l1(3)] {
        let d = s.dim();
        let scaled = s.distorted(&(DMatrix::identity(d, d) * 2.0)).unwrap();
        assert_eq!(defect(&s, &opts(7)).m_value, defect(&scaled, &opts(7)).m_value);
    }
}

fn planar(theta: f64) -> ProjectionPair {
    let (c, s) = (theta.cos(), theta.sin());
    ProjectionPair::new(NormedSpace::euclidean(2), line(&[1.0, 0.0]), line(&[0.0, 1.0]), line(&[c, s]), line(&[-s, c])).unwrap()
}

#[test]
fn planar_eigenvalues() {
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let r = composed_projection_eigen(&planar(theta), 0).unwrap();
        assert!((r.lambda - theta.cos().powi(2)).abs() < 1e-8);
        assert!(r.norm_residual < 1e-8);
        assert!(r.lambda > 0.0 && r.lambda < 1.0);
        assert!(r.pass);
    }
}

/// ℝ⁴ with `A = span(e1, e2)` and `B` its rotation by `θ` in the planes
/// `(e1, e3)` and `(e2, e4)`.
fn rotated_r4(theta: f64, space: NormedSpace) -> ProjectionPair {
    let (c, s) = (theta.cos(), theta.sin());
    let b = Subspace::from_vectors(4, &[vec![c, 0.0, s, 0.0], vec![0.0, c, 0.0, s]]).unwrap();
    let bbar = Subspace::from_vectors(4, &[vec![-s, 0.0, c, 0.0], vec![0.0, -s, 0.0, c]]).unwrap();
    ProjectionPair::new(space, coord(4, &[0, 1]), coord(4, &[2, 3]), b, bbar).unwrap()
}

#[test]
fn rotated_planes_give_scalar_q() {
    let r = composed_projection_eigen(&rotated_r4(FRAC_PI_4, NormedSpace::euclidean(4)), 0).unwrap();
    assert!((r.lambda - 0.5).abs() < 1e-12);
    assert_eq!(r.eigenspace_dim, 2);
    assert!(r.pass);
}

/// `B` random, `B̄` its `G`-orthogonal complement.
fn random_orthogonal_pair(rng: &mut ChaCha8Rng, g: &DMatrix<f64>, d: usize, k: usize) -> (Subspace, Subspace) {
    let b = Subspace::span_of(&DMatrix::from_fn(d, k, |_, _| normal(rng)));
    let bbar = b.complement(g);
    (b, bbar)
}

#[test]
fn variational_value_matches_top_eigenvalue() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let d = 2 * rng.random_range(1..=3);
        let g = random_gram(&mut rng, d);
        let (a, abar) = random_orthogonal_pair(&mut rng, &g, d, d / 2);
        let (b, bbar) = random_orthogonal_pair(&mut rng, &g, d, d / 2);
        let pp = ProjectionPair::new(NormedSpace::gram(g).unwrap(), a, abar, b, bbar).unwrap();
        let r = composed_projection_eigen(&pp, 0).unwrap();
        assert!((r.lambda - r.lambda_variational).abs() < 1e-8, "{r:?}");
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn unique_identity_on_planted_scalar_instances() {
    for lambda in [0.5f64, 0.75] {
        let theta = lambda.sqrt().acos();
        let pp = rotated_r4(theta, NormedSpace::euclidean(4));
        let r = check_lemma_unique(&pp, lambda, 512, 1).unwrap();
        assert!(r.identity_holds && r.euclidean, "{r:?}");
        assert!(r.ambient_residual < 1e-8 && r.reduced_residual < 1e-8);
    }
}

#[test]
fn unique_identity_fails_for_l4() {
    let space = NormedSpace::p_norm(4.0, 2).unwrap();
    let pp = ProjectionPair::new(space, line(&[1.0, 0.0]), line(&[0.0, 1.0]), line(&[1.0, 1.0]), line(&[1.0, -1.0])).unwrap();
    let r = check_lemma_unique(&pp, 0.5, 512, 1).unwrap();
    assert!(!r.identity_holds);
    assert!(r.ambient_residual > 1e-3);
    assert!(!r.euclidean);
}

#[test]
fn unique_refuses_non_scalar_q() {
    let pp = rotated_r4(FRAC_PI_4, NormedSpace::euclidean(4));
    assert!(matches!(check_lemma_unique(&pp, 0.3, 16, 0), Err(RigidityError::Precondition(_))));
}

#[test]
fn strike_confirms_euclidean_on_random_transversal_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut confirmed = 0;
    for inst in 0..100 {
        let d = if inst % 2 == 0 { 4 } else { 6 };
        let g = random_gram(&mut rng, d);
        let (a, abar) = random_orthogonal_pair(&mut rng, &g, d, d / 2);
        let (b, bbar) = random_orthogonal_pair(&mut rng, &g, d, d / 2);
        let pp = ProjectionPair::new(NormedSpace::gram(g).unwrap(), a, abar, b, bbar).unwrap();
        assert!(pp.is_transversal());
        let o = StrikeOptions { defect: DefectOptions { starts: 64, seed: inst, ..Default::default() }, ..Default::default() };
        match check_strike(&pp, &o).unwrap() {
            StrikeVerdict::EuclideanConfirmed { .. } => confirmed += 1,
            other => panic!("instance {inst}: {other:?}"),
        }
    }
    assert_eq!(confirmed, 100);
}

#[test]
fn coordinate_splits_of_linf4_are_never_transversal() {
    let space = NormedSpace::linf(4);
    let mut splits = Vec::new();
    for mask in 1..8usize {
        let first: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
        let second: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 0).collect();
        splits.push((coord(4, &first), coord(4, &second)));
    }
    for (a, abar) in &splits {
        for (b, bbar) in &splits {
            let pp = ProjectionPair::new(space.clone(), a.clone(), abar.clone(), b.clone(), bbar.clone()).unwrap();
            assert!(matches!(check_strike(&pp, &StrikeOptions::default()), Err(RigidityError::NotTransversal(_))));
        }
    }
}

#[test]
fn product_decompositions_of_linf_squares_are_refused() {
    let space = NormedSpace::product_of(vec![NormedSpace::linf(2), NormedSpace::linf(2)]);
    let found = coordinate_decompositions(&space, 256, 0);
    assert_eq!(found.len(), 1);
    for (a, abar) in &found {
        for (b, bbar) in &found {
            for (b, bbar) in [(b, bbar), (bbar, b)] {
                let pp = ProjectionPair::new(space.clone(), a.clone(), abar.clone(), b.clone(), bbar.clone()).unwrap();
                assert!(matches!(check_strike(&pp, &StrikeOptions::default()), Err(RigidityError::NotTransversal(_))));
            }
        }
    }
}

#[test]
fn strike_reports_inconsistent_non_product_input() {
    let space = NormedSpace::p_norm(4.0, 2).unwrap();
    let pp = ProjectionPair::new(space, line(&[1.0, 0.0]), line(&[0.0, 1.0]), line(&[1.0, 1.0]), line(&[1.0, -1.0])).unwrap();
    let o = StrikeOptions { require_product: false, defect: opts(0) };
    match check_strike(&pp, &o).unwrap() {
        StrikeVerdict::Inconsistent { m_value, reasons, .. } => {
            assert!(m_value > 1.0 + 1e-3);
            assert!(!reasons.is_empty());
        }
        other => panic!("{other:?}"),
    }
    let strict = StrikeOptions { require_product: true, defect: opts(0) };
    assert!(matches!(check_strike(&pp, &strict), Err(RigidityError::Precondition(_))));
}

#[test]
fn extremal_pairs_split_into_extremal_parts() {
    let space = NormedSpace::product_of(vec![NormedSpace::linf(2), NormedSpace::linf(2)]);
    let (s1, s2) = (coord(4, &[0, 1]), coord(4, &[2, 3]));
    let m = SQRT_2;
    let one_block = extremal_rectangularity(&space, &s1, &s2, (&v(&[1.0, 1.0, 0.0, 0.0]), &v(&[1.0, -1.0, 0.0, 0.0])), m).unwrap();
    assert!(one_block.pass && one_block.second_ratio.is_none());
    let mixed =
        extremal_rectangularity(&space, &s1, &s2, (&v(&[1.0, 1.0, 1.0, 1.0]), &v(&[1.0, -1.0, 1.0, -1.0])), m).unwrap();
    assert!(mixed.pass);
    assert!((mixed.first_ratio.unwrap() - m).abs() < 1e-12 && (mixed.second_ratio.unwrap() - m).abs() < 1e-12);
    let not_extremal = extremal_rectangularity(&space, &s1, &s2, (&v(&[1.0, 0.0, 0.0, 0.0]), &v(&[0.0, 0.0, 0.0, 0.0])), m);
    assert!(not_extremal.is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let e = NormedSpace::euclidean(4);
    for _ in 0..10 {
        let x = DVector::from_fn(4, |_, _| normal(&mut rng));
        let y = DVector::from_fn(4, |_, _| normal(&mut rng));
        assert!(extremal_rectangularity(&e, &s1, &s2, (&x, &y), 1.0).unwrap().pass);
    }
}

#[test]
fn intersection_is_a_factor() {
    let lines = NormedSpace::product_of((0..4).map(|_| NormedSpace::linf(1)).collect());
    let pp = ProjectionPair::new(lines.clone(), coord(4, &[0, 1]), coord(4, &[2, 3]), coord(4, &[0, 2]), coord(4, &[1, 3])).unwrap();
    let r = check_maininter_unbound(&pp, 256, 0).unwrap();
    assert_eq!(r.f_dim, 1);
    assert!(r.is_factor);
    assert!(r.complement.unwrap().same_as(&coord(4, &[2])));

    let same = ProjectionPair::new(lines, coord(4, &[0, 1]), coord(4, &[2, 3]), coord(4, &[0, 1]), coord(4, &[2, 3])).unwrap();
    let r = check_maininter_unbound(&same, 256, 0).unwrap();
    assert_eq!(r.f_dim, 2);
    assert!(r.is_factor);

    let r = check_maininter_unbound(&rotated_r4(0.4, NormedSpace::euclidean(4)), 256, 0).unwrap();
    assert_eq!(r.f_dim, 0);
    assert!(r.is_factor && r.unbound_configuration && r.unbound_pass);
}
