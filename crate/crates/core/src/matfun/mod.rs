//! Dense complex matrix functions: square root, exponential, resolvent and
//! the Sylvester solver, plus the Schur and SVD factorisations they rest on.

mod expm;
mod schur;
mod sqrtm;
mod svd;
mod sylvester;

pub use expm::expm;
pub use schur::{schur, Schur};
pub use sqrtm::{sqrtm, sqrtm_with};
pub use svd::{singular_values, svd, Svd};
pub use sylvester::{solve_sylvester, solve_sylvester_with};

use crate::error::{GbdtError, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::tolerances::Tolerances;

/// Square root with argument in (−π/2, π/2], i.e. the argument of `z`
/// taken from (−π, π] and halved. A negative zero imaginary part is treated
/// as +0 so negative reals map to the positive imaginary axis.
pub fn principal_sqrt(z: C64) -> C64 {
    let z = if z.im == 0.0 { C64::new(z.re, 0.0) } else { z };
    z.sqrt()
}

pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    Ok(schur(a)?.eigenvalues())
}

/// Reciprocal 2-norm condition number `sigma_min / sigma_max`.
pub fn rcond(a: &ComplexMatrix) -> f64 {
    svd(a).rcond()
}

/// `(A − λI)⁻¹`.
pub fn resolvent(a: &ComplexMatrix, lambda: C64) -> Result<ComplexMatrix> {
    resolvent_with(a, lambda, &Tolerances::default())
}

pub fn resolvent_with(a: &ComplexMatrix, lambda: C64, tol: &Tolerances) -> Result<ComplexMatrix> {
    a.require_square("resolvent input")?;
    let n = a.rows();
    let distance = eigenvalues(a)?
        .into_iter()
        .map(|mu| (mu - lambda).norm())
        .fold(f64::INFINITY, f64::min);
    let spectral_point = || GbdtError::SpectralPoint {
        re: lambda.re,
        im: lambda.im,
        distance,
    };
    if distance <= tol.eigen_tol * a.norm_fro().max(lambda.norm()) {
        return Err(spectral_point());
    }
    a.add_identity(-lambda)
        .solve(&ComplexMatrix::identity(n))
        .map_err(|_| spectral_point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};

    #[test]
    fn resolvent_of_zero() {
        let r = resolvent(&ComplexMatrix::zeros(2, 2), ONE).unwrap();
        assert_eq!(r, ComplexMatrix::identity(2).scale_real(-1.0));
    }

    #[test]
    fn resolvent_of_jordan_block() {
        let a = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = resolvent(&a, ONE).unwrap();
        let expected = ComplexMatrix::from_real(&[&[-1.0, -1.0], &[0.0, -1.0]]);
        assert!((&r - &expected).norm_fro() < 1e-15);
    }

    #[test]
    fn resolvent_at_eigenvalue() {
        let a = ComplexMatrix::from_real(&[&[1.0]]);
        assert!(matches!(resolvent(&a, ONE), Err(GbdtError::SpectralPoint { .. })));
        assert!(matches!(
            resolvent(&ComplexMatrix::zeros(2, 2), ZERO),
            Err(GbdtError::SpectralPoint { .. })
        ));
    }

    #[test]
    fn principal_sqrt_branch() {
        assert_eq!(principal_sqrt(C64::new(4.0, 0.0)), C64::new(2.0, 0.0));
        assert!((principal_sqrt(C64::new(-1.0, -0.0)) - C64::new(0.0, 1.0)).norm() < 1e-16);
        // just below the cut stays in the lower half plane
        assert!(principal_sqrt(C64::new(-1.0, -1e-300)).im < 0.0);
    }
}
