use serde::Serialize;

use crate::error::{GbdtError, Result};
use crate::matrix::{ComplexMatrix, ONE};
use crate::tolerances::Tolerances;

/// GBDT parameter data `{A, S(0), Π(0) = [θ1 θ2]}`.
///
/// Construction only checks shapes; whether the data satisfies the
/// parameter identity is reported by [`validate_triple`].
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    a: ComplexMatrix,
    s0: ComplexMatrix,
    theta1: ComplexMatrix,
    theta2: ComplexMatrix,
}

impl Triple {
    pub fn new(
        a: ComplexMatrix,
        s0: ComplexMatrix,
        theta1: ComplexMatrix,
        theta2: ComplexMatrix,
    ) -> Result<Self> {
        a.require_square("A")?;
        let n = a.rows();
        s0.require_shape(n, n, "S(0)")?;
        let h = theta1.cols();
        theta1.require_shape(n, h, "theta1")?;
        theta2.require_shape(n, h, "theta2")?;
        if n == 0 || h == 0 {
            return Err(GbdtError::ShapeMismatch("n and h must be positive".into()));
        }
        for m in [&a, &s0, &theta1, &theta2] {
            if !m.is_finite() {
                return Err(GbdtError::InvalidParameter("triple contains non-finite entries".into()));
            }
        }
        Ok(Triple { a, s0, theta1, theta2 })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn h(&self) -> usize {
        self.theta1.cols()
    }

    /// Column count of Π, `m = 2h`.
    pub fn m(&self) -> usize {
        2 * self.h()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn s0(&self) -> &ComplexMatrix {
        &self.s0
    }

    pub fn theta1(&self) -> &ComplexMatrix {
        &self.theta1
    }

    pub fn theta2(&self) -> &ComplexMatrix {
        &self.theta2
    }

    pub fn pi0(&self) -> ComplexMatrix {
        ComplexMatrix::hstack(&self.theta1, &self.theta2)
    }
}

/// `j = [[0, I_h], [−I_h, 0]]`.
pub fn j_matrix(h: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(2 * h, 2 * h);
    for i in 0..h {
        j[(i, h + i)] = ONE;
        j[(h + i, i)] = -ONE;
    }
    j
}

/// `A·S − S·A* − Π·j·Π*`.
pub fn identity_defect(a: &ComplexMatrix, s: &ComplexMatrix, pi: &ComplexMatrix) -> ComplexMatrix {
    let h = pi.cols() / 2;
    let left = &(a * s) - &(s * &a.adjoint());
    let right = &(pi * &j_matrix(h)) * &pi.adjoint();
    &left - &right
}

/// Magnitude the identity residual is measured against: `‖A‖‖S‖ + ‖Π‖²`.
pub fn identity_scale(a: &ComplexMatrix, s: &ComplexMatrix, pi: &ComplexMatrix) -> f64 {
    a.norm_fro() * s.norm_fro() + pi.norm_fro().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleReport {
    /// `‖A·S0 − S0·A* − Π(0)·j·Π(0)*‖_F`
    pub identity_residual: f64,
    /// `‖S0 − S0*‖_F`
    pub hermitian_residual: f64,
    pub identity_scale: f64,
    pub passed: bool,
}

pub fn validate_triple(triple: &Triple, tol: &Tolerances) -> TripleReport {
    let pi0 = triple.pi0();
    let identity_residual = identity_defect(&triple.a, &triple.s0, &pi0).norm_fro();
    let hermitian_residual = triple.s0.hermitian_residual();
    let scale = identity_scale(&triple.a, &triple.s0, &pi0);
    let passed = identity_residual <= tol.identity_tol * scale.max(1.0)
        && hermitian_residual <= tol.identity_tol * triple.s0.norm_fro().max(1.0);
    TripleReport {
        identity_residual,
        hermitian_residual,
        identity_scale: scale,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    #[test]
    fn zero_a_and_theta1_is_exact() {
        let s0 = ComplexMatrix::from_rows(&[
            vec![C64::new(2.0, 0.0), C64::new(1.0, -3.0)],
            vec![C64::new(1.0, 3.0), C64::new(-5.0, 0.0)],
        ])
        .unwrap();
        let theta2 = ComplexMatrix::from_rows(&[vec![C64::new(0.3, 1.1)], vec![C64::new(-2.0, 0.5)]]).unwrap();
        let t = Triple::new(ComplexMatrix::zeros(2, 2), s0, ComplexMatrix::zeros(2, 1), theta2).unwrap();
        let r = validate_triple(&t, &Tolerances::default());
        assert_eq!(r.identity_residual, 0.0);
        assert_eq!(r.hermitian_residual, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn non_hermitian_s0_fails() {
        let s0 = ComplexMatrix::from_real(&[&[1.0, 0.5], &[0.0, 1.0]]);
        let t = Triple::new(
            ComplexMatrix::zeros(2, 2),
            s0,
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::zeros(2, 1),
        )
        .unwrap();
        let r = validate_triple(&t, &Tolerances::default());
        assert!(r.hermitian_residual > 0.1);
        assert!(!r.passed);
    }

    #[test]
    fn shape_errors() {
        let e = Triple::new(
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(3, 3),
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::zeros(2, 1),
        );
        assert!(matches!(e, Err(GbdtError::ShapeMismatch(_))));
        let e = Triple::new(
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::zeros(2, 2),
        );
        assert!(matches!(e, Err(GbdtError::ShapeMismatch(_))));
    }

    #[test]
    fn j_is_skew_and_orthogonal() {
        let j = j_matrix(2);
        let jj = &j * &j;
        assert_eq!(jj, ComplexMatrix::identity(4).scale_real(-1.0));
        assert_eq!(j.adjoint(), j.scale_real(-1.0));
    }
}
