use gbdt::catalog::ExamplePreset;
use gbdt::corpus::{kdv_corpus, stationary_corpus, Conditioning};
use gbdt::verify::{
    dynamic_residual, identity_sweep, kdv_residual, schrodinger_residual, Grid1, Grid2, DYNAMIC_TOLERANCE,
    KDV_TOLERANCE, SCHRODINGER_TOLERANCE,
};
use gbdt::{ComplexMatrix, Construction, SolutionRequest, Tolerances, Triple, C64, I, ONE, ZERO};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn corpus() -> Vec<Construction> {
    stationary_corpus(11, 20, 4, 2, &Conditioning::default(), &tol()).unwrap()
}

fn request(h: usize) -> SolutionRequest {
    let f0 = (0..2 * h).map(|i| C64::new(1.0 + i as f64, 0.5)).collect();
    SolutionRequest::new(C64::new(1.7, 0.2), f0)
}

fn dynamic_grid() -> Grid2 {
    Grid2 {
        x: Grid1::new(0.0, 2.0, 2.0 / 49.0).unwrap(),
        t: Grid1::new(0.0, 0.49, 0.01).unwrap(),
    }
}

#[test]
fn tolerances_are_pinned() {
    assert_eq!(
        (SCHRODINGER_TOLERANCE.floor, SCHRODINGER_TOLERANCE.constant, SCHRODINGER_TOLERANCE.order),
        (1e-6, 1.0, 4)
    );
    assert_eq!((DYNAMIC_TOLERANCE.floor, DYNAMIC_TOLERANCE.constant, DYNAMIC_TOLERANCE.order), (1e-6, 1.0, 2));
    assert_eq!((KDV_TOLERANCE.floor, KDV_TOLERANCE.constant, KDV_TOLERANCE.order), (1e-5, 10.0, 2));
}

#[test]
fn corpus_solves_both_equations() {
    for (k, c) in corpus().iter().enumerate() {
        let req = request(c.triple().h());
        for step in [0.02, 0.01] {
            let grid = Grid1::new(0.0, 3.0, step).unwrap();
            let r = schrodinger_residual(
                |x| c.potential(x),
                |x| c.transformed_solution(x, &req),
                req.lambda(),
                &grid,
                SCHRODINGER_TOLERANCE,
            )
            .unwrap();
            assert!(r.passed() && r.skipped.is_empty(), "case {k} step {step}: ratio {:e}", r.worst_ratio);
        }
        let r = dynamic_residual(|x| c.potential(x), |x, t| c.dynamic_solution(x, t), &dynamic_grid(), DYNAMIC_TOLERANCE)
            .unwrap();
        assert!(r.passed(), "case {k}: dynamic ratio {:e}", r.worst_ratio);
        let sweep = identity_sweep(c, &Grid1::new(-5.0, 5.0, 0.1).unwrap()).unwrap();
        assert!(sweep.max_relative <= 1e-9, "case {k}: identity {:e}", sweep.max_relative);
    }
}

#[test]
fn halving_the_step_shrinks_the_residual() {
    // the two grids share their interior stencil centres; at step 0.01 some
    // cases already sit on the rounding floor, so the pair is 0.04 / 0.02
    let coarse = Grid1::new(0.0, 3.0, 0.04).unwrap();
    let fine = Grid1::new(0.04, 2.96, 0.02).unwrap();
    for (k, c) in corpus().iter().enumerate() {
        let req = request(c.triple().h());
        let run = |g: &Grid1| {
            schrodinger_residual(|x| c.potential(x), |x| c.transformed_solution(x, &req), req.lambda(), g, SCHRODINGER_TOLERANCE)
                .unwrap()
                .max_residual
        };
        let (rc, rf) = (run(&coarse), run(&fine));
        // below ~1e-9 rounding dominates and the order is not observable
        if rc > 1e-9 {
            assert!(rc / rf >= 8.0, "case {k}: {rc:e} / {rf:e} = {:.2}", rc / rf);
        }
    }
}

#[test]
fn inverse_square_fundamental_solution() {
    // independent potential 6/x², pipeline solution
    let c = ExamplePreset::ee36(1.0, 1.0).unwrap().construction(&tol()).unwrap();
    let req = SolutionRequest::new(C64::new(1.7, 0.0), vec![ONE, ZERO]);
    let grid = Grid1::new(0.5, 5.0, 1e-3).unwrap();
    let r = schrodinger_residual(
        |x| Ok(ComplexMatrix::diag(&[C64::new(6.0 / (x * x), 0.0)])),
        |x| c.transformed_solution(x, &req),
        req.lambda(),
        &grid,
        SCHRODINGER_TOLERANCE,
    )
    .unwrap();
    assert!(r.max_residual <= 1e-6, "{:e}", r.max_residual);
    for x in [0.5, 1.0, 3.0] {
        assert!((c.potential(x).unwrap()[(0, 0)] - C64::new(6.0 / (x * x), 0.0)).norm() <= 1e-10);
    }
}

#[test]
fn zero_a_dynamical_case() {
    let s0 = ComplexMatrix::from_real(&[&[2.0, 0.3], &[0.3, 1.0]]);
    let theta2 = ComplexMatrix::from_rows(&[vec![C64::new(1.0, 0.5)], vec![C64::new(-0.2, 0.0)]]).unwrap();
    let c = ExamplePreset::ee2(s0, theta2).unwrap().construction(&tol()).unwrap();
    let grid = Grid2 {
        x: Grid1::new(0.0, 2.0, 0.01).unwrap(),
        t: Grid1::new(0.0, 0.49, 0.01).unwrap(),
    };
    let r = dynamic_residual(|x| c.potential(x), |x, t| c.dynamic_solution(x, t), &grid, DYNAMIC_TOLERANCE).unwrap();
    assert!(r.passed() && r.max_residual <= 1e-6, "{:e}", r.max_residual);
}

#[test]
fn trivial_triple_gives_free_motion() {
    let t = Triple::new(
        ComplexMatrix::from_real(&[&[2.0]]),
        ComplexMatrix::identity(1),
        ComplexMatrix::zeros(1, 1),
        ComplexMatrix::zeros(1, 1),
    )
    .unwrap();
    let c = Construction::from_triple(t, None, &tol()).unwrap();
    let req = request(1);
    let grid = Grid1::new(0.0, 3.0, 0.01).unwrap();
    let r = schrodinger_residual(|x| c.potential(x), |x| c.transformed_solution(x, &req), req.lambda(), &grid, SCHRODINGER_TOLERANCE)
        .unwrap();
    assert!(r.passed());
    // free equation: the stencil error h⁴|λ|³|y|/90 bounds the residual
    let bound = 1e-8 * req.lambda().norm().powi(3) / 90.0 * 30.0;
    assert!(r.max_residual <= bound, "{:e} > {:e}", r.max_residual, bound);
}

#[test]
fn reports_are_deterministic() {
    let c = &corpus()[3];
    let req = request(c.triple().h());
    let grid = Grid1::new(0.0, 3.0, 0.01).unwrap();
    let run = || {
        schrodinger_residual(|x| c.potential(x), |x| c.transformed_solution(x, &req), req.lambda(), &grid, SCHRODINGER_TOLERANCE)
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.max_residual.to_bits(), b.max_residual.to_bits());
    assert_eq!(a.worst_ratio.to_bits(), b.worst_ratio.to_bits());
    assert_eq!(a.location, b.location);
}

#[test]
fn negative_controls_fail() {
    let c = &corpus()[5];
    let req = request(c.triple().h());
    let grid = Grid1::new(0.0, 3.0, 0.01).unwrap();
    let shifted = |x: f64| c.potential(x).map(|u| u.add_identity(C64::new(0.01, 0.0)));
    let r = schrodinger_residual(shifted, |x| c.transformed_solution(x, &req), req.lambda(), &grid, SCHRODINGER_TOLERANCE)
        .unwrap();
    assert!(!r.passed(), "shifted potential ratio {:e}", r.worst_ratio);
    let wrong_lambda = req.lambda() + 0.01 * I;
    let r = schrodinger_residual(|x| c.potential(x), |x| c.transformed_solution(x, &req), wrong_lambda, &grid, SCHRODINGER_TOLERANCE)
        .unwrap();
    assert!(!r.passed());

    // time reversal breaks the dynamical equation
    let r = dynamic_residual(|x| c.potential(x), |x, t| c.dynamic_solution(x, -t), &dynamic_grid(), DYNAMIC_TOLERANCE)
        .unwrap();
    assert!(!r.passed());

    let cond = Conditioning {
        x_range: (0.0, 2.0),
        t_range: (0.0, 0.2),
        ..Conditioning::default()
    };
    let k = &kdv_corpus(5, 4, &cond, &tol()).unwrap()[3];
    let grid = Grid2 {
        x: Grid1::new(0.0, 2.0, 0.01).unwrap(),
        t: Grid1::new(0.0, 0.2, 0.004).unwrap(),
    };
    let good = kdv_residual(|x, t| k.potential(x, t), &grid, KDV_TOLERANCE).unwrap();
    assert!(good.passed());
    let doubled = kdv_residual(|x, t| k.potential(x, t).map(|u| u.scale_real(2.0)), &grid, KDV_TOLERANCE).unwrap();
    assert!(!doubled.passed());
}
