use crate::error::{GbdtError, Result};
use crate::matfun::schur::schur;
use crate::matfun::svd::svd;
use crate::matfun::principal_sqrt;
use crate::matrix::ComplexMatrix;
use crate::tolerances::Tolerances;

/// Principal square root of an invertible matrix.
///
/// The matrix is brought to upper-triangular Schur form `T`, the root `R` of
/// `T` is built column by column from
///
/// `R_jj = √T_jj`, `R_ij = (T_ij − Σ_{i<k<j} R_ik R_kj) / (R_ii + R_jj)`,
///
/// and transformed back. Every diagonal entry takes the principal branch, so
/// the result is deterministic.
pub fn sqrtm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    sqrtm_with(a, &Tolerances::default())
}

pub fn sqrtm_with(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    a.require_square("sqrtm input")?;
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let rcond = svd(a).rcond();
    if rcond < tol.rank_tol {
        return Err(GbdtError::SingularMatrix { rcond });
    }
    let s = schur(a)?;
    let t = &s.triangular;
    let mut r = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = principal_sqrt(t[(j, j)]);
        for i in (0..j).rev() {
            let mut acc = t[(i, j)];
            for k in i + 1..j {
                acc -= r[(i, k)] * r[(k, j)];
            }
            let denom = r[(i, i)] + r[(j, j)];
            if denom.norm() == 0.0 {
                return Err(GbdtError::NoRootFound { row: i, col: j });
            }
            r[(i, j)] = acc / denom;
        }
    }
    Ok(&(&s.unitary * &r) * &s.unitary.adjoint())
}
