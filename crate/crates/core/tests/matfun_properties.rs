use gbdt::matfun::{expm, resolvent, rcond, solve_sylvester, sqrtm};
use gbdt::verify::brute_force_sylvester;
use gbdt::{ComplexMatrix, GbdtError, C64};
use proptest::prelude::*;

fn matrix(n: usize, radius: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-radius..radius, -radius..radius), n * n)
        .prop_map(move |v| ComplexMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1)))
}

fn sized_matrix(max_n: usize, radius: f64) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_n).prop_flat_map(move |n| matrix(n, radius))
}

/// Entrywise Taylor sum, used as an oracle for small arguments.
fn taylor_exp(m: &ComplexMatrix, terms: usize) -> ComplexMatrix {
    let n = m.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..terms {
        term = (&term * m).scale_real(1.0 / k as f64);
        sum += &term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrtm_squares_back(a in sized_matrix(4, 2.0)) {
        prop_assume!(rcond(&a) > 1e-6);
        let q = sqrtm(&a).unwrap();
        prop_assert!((&(&q * &q) - &a).norm_fro() <= 1e-10 * a.norm_fro());
    }

    #[test]
    fn expm_inverse_pair(m in sized_matrix(4, 2.5)) {
        prop_assume!(m.norm_fro() <= 10.0);
        let (e, e_inv) = (expm(&m), expm(&m.scale_real(-1.0)));
        // rounding in the product grows with ‖e^M‖·‖e^−M‖, which is 1 for normal M
        let conditioning = (e.norm_fro() * e_inv.norm_fro() / m.rows() as f64).max(1.0);
        let prod = &e * &e_inv;
        prop_assert!((&prod - &ComplexMatrix::identity(m.rows())).norm_fro() <= 1e-10 * conditioning);
    }

    #[test]
    fn expm_semigroup(m in sized_matrix(4, 1.0), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let lhs = expm(&m.scale_real(s + t));
        let rhs = &expm(&m.scale_real(s)) * &expm(&m.scale_real(t));
        prop_assert!((&lhs - &rhs).norm_fro() <= 1e-10 * lhs.norm_fro().max(1.0));
    }

    #[test]
    fn expm_matches_taylor_for_small_arguments(m in sized_matrix(4, 0.2)) {
        let diff = (&expm(&m) - &taylor_exp(&m, 30)).norm_fro();
        prop_assert!(diff <= 1e-13);
    }

    #[test]
    fn sylvester_agrees_with_brute_force(
        (p, r, c) in (1usize..=4).prop_flat_map(|n| (matrix(n, 2.0), matrix(n, 2.0), matrix(n, 2.0)))
    ) {
        match (solve_sylvester(&p, &r, &c), brute_force_sylvester(&p, &r, &c)) {
            (Ok(z), Ok(zb)) => {
                prop_assert!((&z - &zb).norm_fro() <= 1e-10 * zb.norm_fro().max(1.0));
                let residual = (&(&(&p * &z) + &(&z * &r)) - &c).norm_fro();
                prop_assert!(residual <= 1e-10 * (p.norm_fro() + r.norm_fro()) * z.norm_fro().max(1.0));
            }
            (Err(GbdtError::SpectraOverlap { .. }), _) => {}
            (Ok(_), Err(e)) => prop_assert!(false, "oracle failed where solver succeeded: {e}"),
            (Err(e), _) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn resolvent_inverts_shifted_matrix(a in sized_matrix(4, 1.0), re in 3.0f64..5.0, im in -1.0f64..1.0) {
        let lambda = C64::new(re, im);
        let r = resolvent(&a, lambda).unwrap();
        let shifted = a.add_identity(-lambda);
        prop_assert!((&(&shifted * &r) - &ComplexMatrix::identity(a.rows())).norm_fro() <= 1e-10);
    }
}

#[test]
fn rotation_generator_root_multiplies_back() {
    let a = ComplexMatrix::from_real(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    let q = sqrtm(&a).unwrap();
    let q2 = &q * &q;
    for i in 0..2 {
        for j in 0..2 {
            assert!((q2[(i, j)] - a[(i, j)]).norm() < 1e-12);
        }
    }
}

#[test]
fn resolvent_examples() {
    let zero = ComplexMatrix::zeros(2, 2);
    let r = resolvent(&zero, C64::new(1.0, 0.0)).unwrap();
    assert!((&r + &ComplexMatrix::identity(2)).norm_fro() < 1e-15);

    // (J − I)⁻¹ = −[[1, 1], [0, 1]] for the Jordan block J
    let jordan = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let r = resolvent(&jordan, C64::new(1.0, 0.0)).unwrap();
    let expected = ComplexMatrix::from_real(&[&[-1.0, -1.0], &[0.0, -1.0]]);
    assert!((&r - &expected).norm_fro() < 1e-15);

    let one = ComplexMatrix::identity(1);
    assert!(matches!(resolvent(&one, C64::new(1.0, 0.0)), Err(GbdtError::SpectralPoint { .. })));
}
