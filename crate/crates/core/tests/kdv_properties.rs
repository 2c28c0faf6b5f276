use gbdt::corpus::{kdv_corpus, random_triple, rng, Conditioning};
use gbdt::verify::{kdv_identity_sweep, kdv_residual, Grid1, Grid2, KDV_TOLERANCE};
use gbdt::{
    ComplexMatrix, Construction, Dressing, KdvConstruction, KdvDressing, PathOrder, SMode, Tolerances,
};
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn raw_kdv(seed: u64, n: usize, h: usize) -> (KdvConstruction, Construction) {
    let mut r = rng(seed);
    let triple = random_triple(&mut r, n, h).unwrap();
    let dressing = Dressing::new(triple, None, &tol()).unwrap();
    let stationary = Construction::new(dressing.clone(), &tol());
    let kdv = KdvConstruction::new(KdvDressing::new(dressing, &tol()).unwrap(), &tol());
    (kdv, stationary)
}

fn corpus() -> Vec<KdvConstruction> {
    let cond = Conditioning {
        x_range: (0.0, 2.0),
        t_range: (0.0, 0.2),
        ..Conditioning::default()
    };
    kdv_corpus(5, 10, &cond, &tol()).unwrap()
}

fn central(f: impl Fn(f64) -> ComplexMatrix, at: f64, h: f64) -> ComplexMatrix {
    let mut acc = (&f(at + h) - &f(at - h)).scale_real(8.0);
    acc += &(&f(at - 2.0 * h) - &f(at + 2.0 * h));
    acc.scale_real(1.0 / (12.0 * h))
}

fn gram(m: &ComplexMatrix) -> ComplexMatrix {
    m * &m.adjoint()
}

/// `4(A·Λ2Λ2* + Λ2Λ2*·A* + Λ1Λ1*)`, assembled here from the blocks.
fn time_rate(c: &KdvConstruction, x: f64, t: f64) -> ComplexMatrix {
    let a = c.dressing().triple().a();
    let (l1, l2) = c.lambda_pair(x, t);
    let g = gram(&l2);
    let mut sum = a * &g;
    sum += &(&g * &a.adjoint());
    sum += &gram(&l1);
    sum.scale_real(4.0)
}

const POINTS: [(f64, f64); 5] = [(0.0, 0.1), (0.7, -0.2), (-1.5, 0.05), (2.0, 0.3), (1.1, 0.0)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reduces_to_stationary_at_initial_time(seed in 0u64..10_000, n in 1usize..=3, h in 1usize..=2) {
        let (kdv, stat) = raw_kdv(seed, n, h);
        for x in [-2.0, -0.3, 0.0, 1.0, 2.5] {
            let (a1, a2) = kdv.lambda_pair(x, 0.0);
            let (b1, b2) = stat.dressing().lambda_pair(x);
            prop_assert!(rel((&a1 - &b1).norm_fro(), b1.norm_fro()) <= 1e-12);
            prop_assert!(rel((&a2 - &b2).norm_fro(), b2.norm_fro()) <= 1e-12);
            let (sk, ss) = (kdv.s_matrix(x, 0.0).unwrap(), stat.s_matrix(x).unwrap());
            prop_assert!(rel((&sk - &ss).norm_fro(), ss.norm_fro()) <= 1e-10);
        }
    }

    #[test]
    fn blocks_evolve_in_time(seed in 0u64..10_000, n in 1usize..=3, h in 1usize..=2) {
        // ∂Λ2/∂t = −4AΛ1 and ∂Λ1/∂t = 4A²Λ2
        let (kdv, _) = raw_kdv(seed, n, h);
        let a = kdv.dressing().triple().a().clone();
        let a2 = &a * &a;
        for (x, t) in POINTS {
            let d1 = central(|s| kdv.lambda_pair(x, s).0, t, 1e-4);
            let d2 = central(|s| kdv.lambda_pair(x, s).1, t, 1e-4);
            let (l1, l2) = kdv.lambda_pair(x, t);
            let e1 = &a2 * &l2.scale_real(4.0);
            let e2 = &a * &l1.scale_real(-4.0);
            prop_assert!(rel((&d1 - &e1).norm_fro(), e1.norm_fro()) <= 1e-8);
            prop_assert!(rel((&d2 - &e2).norm_fro(), e2.norm_fro()) <= 1e-8);
        }
    }

    #[test]
    fn s_follows_both_derivative_laws(seed in 0u64..10_000, n in 1usize..=3, h in 1usize..=2) {
        let (kdv, _) = raw_kdv(seed, n, h);
        prop_assert_eq!(kdv.mode(), SMode::ClosedForm);
        for (x, t) in POINTS {
            let sx = central(|y| kdv.s_matrix(y, t).unwrap(), x, 1e-3);
            let st = central(|s| kdv.s_matrix(x, s).unwrap(), t, 1e-4);
            let gx = gram(&kdv.lambda_pair(x, t).1);
            let gt = time_rate(&kdv, x, t);
            let scale = kdv.s_matrix(x, t).unwrap().norm_fro() + gt.norm_fro();
            prop_assert!(rel((&sx - &gx).norm_fro(), scale) <= 1e-8);
            prop_assert!(rel((&st - &gt).norm_fro(), scale) <= 1e-8);
        }
    }

    #[test]
    fn mixed_partials_commute(seed in 0u64..10_000, n in 1usize..=3, h in 1usize..=2) {
        // ∂t(Λ2Λ2*) = ∂x of the time rate, so the two-form is closed
        let (kdv, _) = raw_kdv(seed, n, h);
        for (x, t) in POINTS {
            let lhs = central(|s| gram(&kdv.lambda_pair(x, s).1), t, 1e-4);
            let rhs = central(|y| time_rate(&kdv, y, t), x, 1e-3);
            prop_assert!(rel((&lhs - &rhs).norm_fro(), rhs.norm_fro()) <= 1e-7);
        }
    }

    #[test]
    fn path_order_is_immaterial(seed in 0u64..10_000, n in 1usize..=3, h in 1usize..=2) {
        let (kdv, _) = raw_kdv(seed, n, h);
        for (x, t) in POINTS {
            let a = kdv.s_matrix_path(x, t, PathOrder::TimeFirst).unwrap();
            let b = kdv.s_matrix_path(x, t, PathOrder::SpaceFirst).unwrap();
            let closed = kdv.s_matrix(x, t).unwrap();
            prop_assert!(rel((&a - &b).norm_fro(), closed.norm_fro()) <= 1e-8);
            prop_assert!(rel((&a - &closed).norm_fro(), closed.norm_fro()) <= 1e-8);
        }
    }
}

#[test]
fn identity_holds_across_the_plane() {
    let grid = Grid2 {
        x: Grid1::new(-2.0, 2.0, 0.25).unwrap(),
        t: Grid1::new(-0.2, 0.2, 0.05).unwrap(),
    };
    for seed in 0..6 {
        let (kdv, _) = raw_kdv(seed, 1 + (seed as usize) % 3, 1 + (seed as usize) % 2);
        let sweep = kdv_identity_sweep(&kdv, &grid).unwrap();
        assert!(sweep.max_relative <= 1e-9, "seed {seed}: {:e}", sweep.max_relative);
    }
}

#[test]
fn corpus_potentials_are_hermitian() {
    let grid = Grid2 {
        x: Grid1::new(0.0, 2.0, 0.1).unwrap(),
        t: Grid1::new(0.0, 0.2, 0.05).unwrap(),
    };
    for c in corpus() {
        let field = c.sample(&grid).unwrap();
        assert!(field.singular.is_empty());
        let sup = field.values.iter().flatten().map(|u| u.norm_fro()).fold(0.0, f64::max);
        for u in field.values.iter().flatten() {
            assert!(rel(u.hermitian_residual(), sup) <= 1e-10);
        }
    }
}

#[test]
fn real_root_scalar_solves_kdv() {
    let c = corpus().remove(0);
    assert_eq!(c.mode(), SMode::Quadrature);
    let q = c.dressing().q()[(0, 0)];
    assert!(q.im == 0.0 && q.re > 0.0);
    let grid = Grid2 {
        x: Grid1::new(0.0, 2.0, 0.01).unwrap(),
        t: Grid1::new(0.0, 0.2, 0.004).unwrap(),
    };
    let report = kdv_residual(|x, t| c.potential(x, t), &grid, KDV_TOLERANCE).unwrap();
    assert!(report.passed(), "worst ratio {:e}", report.worst_ratio);
    assert!(report.skipped.is_empty());
    // real data gives a real potential
    for (x, t) in [(0.3, 0.0), (1.0, 0.1), (1.9, 0.2)] {
        let u = c.potential(x, t).unwrap()[(0, 0)];
        assert!(u.im.abs() <= 1e-10 * u.re.abs().max(1.0));
    }
}

#[test]
fn quadrature_only_agrees_with_closed_form() {
    let (kdv, _) = raw_kdv(9, 2, 2);
    let quad = KdvConstruction::quadrature_only(KdvDressing::new(kdv.dressing().clone(), &tol()).unwrap(), &tol());
    assert_eq!(quad.mode(), SMode::Quadrature);
    for (x, t) in POINTS {
        let a = kdv.s_matrix(x, t).unwrap();
        let b = quad.s_matrix(x, t).unwrap();
        assert!(rel((&a - &b).norm_fro(), a.norm_fro()) <= 1e-8);
    }
}

#[test]
fn nilpotent_example_gives_rational_solution() {
    // A = 0: only S moves in time, S = diag(x³/3 + 4t, d), and ũ is the
    // rational solution 6x(x³ − 24t)/(x³ + 12t)²
    let preset = gbdt::catalog::ExamplePreset::ee3(1.0, 0.0, 1.0).unwrap();
    let c = KdvConstruction::new(KdvDressing::new(preset.dressing(&tol()).unwrap(), &tol()).unwrap(), &tol());
    for (x, t) in [(1.0f64, 0.1), (2.0, 0.1), (0.7, -0.02), (3.0, 1.5)] {
        let expected = 6.0 * x * (x * x * x - 24.0 * t) / (x * x * x + 12.0 * t).powi(2);
        let u = c.potential(x, t).unwrap()[(0, 0)];
        assert!((u.re - expected).abs() <= 1e-10 * expected.abs().max(1.0) && u.im == 0.0, "({x}, {t}): {u}");
    }
    let grid = Grid2 {
        x: Grid1::new(1.0, 3.0, 0.01).unwrap(),
        t: Grid1::new(0.0, 0.2, 0.004).unwrap(),
    };
    assert!(kdv_residual(|x, t| c.potential(x, t), &grid, KDV_TOLERANCE).unwrap().passed());
}
