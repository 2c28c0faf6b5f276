//! Bartels–Stewart solver for `P·Z + Z·R = C`.
//!
//! Both coefficient matrices are reduced to upper-triangular Schur form,
//! `P = U·T·U*`, `R = V·W·V*`, the transformed system `T·Y + Y·W = U*·C·V`
//! is solved one column at a time by back substitution, and `Z = U·Y·V*`.

use crate::error::{GbdtError, Result};
use crate::matfun::schur::schur;
use crate::matrix::ComplexMatrix;
use crate::tolerances::Tolerances;

pub fn solve_sylvester(p: &ComplexMatrix, r: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve_sylvester_with(p, r, c, Tolerances::default().eigen_tol)
}

/// `sep_tol` is relative to `max(‖P‖_F, ‖R‖_F)`: a diagonal sum
/// `T_ii + W_kk` at or below that level is reported as `SpectraOverlap`.
pub fn solve_sylvester_with(
    p: &ComplexMatrix,
    r: &ComplexMatrix,
    c: &ComplexMatrix,
    sep_tol: f64,
) -> Result<ComplexMatrix> {
    p.require_square("P")?;
    r.require_square("R")?;
    c.require_shape(p.rows(), r.rows(), "C")?;
    let n = p.rows();
    let m = r.rows();
    let sp = schur(p)?;
    let sr = schur(r)?;
    let t = &sp.triangular;
    let w = &sr.triangular;
    let threshold = sep_tol * p.norm_fro().max(r.norm_fro());

    let mut separation = f64::INFINITY;
    for i in 0..n {
        for k in 0..m {
            separation = separation.min((t[(i, i)] + w[(k, k)]).norm());
        }
    }
    if separation <= threshold {
        return Err(GbdtError::SpectraOverlap { separation });
    }

    let f = &(&sp.unitary.adjoint() * c) * &sr.unitary;
    let mut y = ComplexMatrix::zeros(n, m);
    for k in 0..m {
        let shift = w[(k, k)];
        for i in (0..n).rev() {
            let mut acc = f[(i, k)];
            for j in 0..k {
                acc -= y[(i, j)] * w[(j, k)];
            }
            for l in i + 1..n {
                acc -= t[(i, l)] * y[(l, k)];
            }
            y[(i, k)] = acc / (t[(i, i)] + shift);
        }
    }
    Ok(&(&sp.unitary * &y) * &sr.unitary.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    #[test]
    fn scalar_case() {
        let one = ComplexMatrix::from_real(&[&[1.0]]);
        let z = solve_sylvester(&one, &one, &ComplexMatrix::from_real(&[&[2.0]])).unwrap();
        assert!((z[(0, 0)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn diagonal_entrywise_formula() {
        let p = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let r = ComplexMatrix::from_real(&[&[3.0, 0.0], &[0.0, 4.0]]);
        let c = ComplexMatrix::from_real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let z = solve_sylvester(&p, &r, &c).unwrap();
        for (j, pj) in [1.0, 2.0].iter().enumerate() {
            for (k, rk) in [3.0, 4.0].iter().enumerate() {
                assert!((z[(j, k)].re - 1.0 / (pj + rk)).abs() < 1e-15);
                assert_eq!(z[(j, k)].im, 0.0);
            }
        }
    }

    #[test]
    fn overlapping_spectra() {
        let p = ComplexMatrix::from_real(&[&[1.0]]);
        let r = ComplexMatrix::from_real(&[&[-1.0]]);
        let err = solve_sylvester(&p, &r, &ComplexMatrix::from_real(&[&[1.0]])).unwrap_err();
        assert!(matches!(err, GbdtError::SpectraOverlap { .. }));
    }

    #[test]
    fn rectangular_right_hand_side() {
        let p = ComplexMatrix::from_real(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let r = ComplexMatrix::from_real(&[&[1.0, 0.5, 0.0], &[0.0, -0.5, 1.0], &[1.0, 0.0, 4.0]]);
        let c = ComplexMatrix::from_fn(2, 3, |i, j| crate::matrix::C64::new(i as f64 + 1.0, j as f64));
        let z = solve_sylvester(&p, &r, &c).unwrap();
        let lhs = &(&p * &z) + &(&z * &r);
        assert!((&lhs - &c).norm_fro() < 1e-13);
    }
}
