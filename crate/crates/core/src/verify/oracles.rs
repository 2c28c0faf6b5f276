use serde::Serialize;

use crate::error::{GbdtError, Result};
use crate::kdv::KdvConstruction;
use crate::matrix::ComplexMatrix;
use crate::transform::Construction;
use crate::verify::grid::{Grid1, Grid2};

/// Largest identity defect over a sweep, relative to the local scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySweep {
    pub max_residual: f64,
    pub max_relative: f64,
    pub samples: usize,
}

impl IdentitySweep {
    fn new() -> Self {
        IdentitySweep {
            max_residual: 0.0,
            max_relative: 0.0,
            samples: 0,
        }
    }

    fn push(&mut self, (residual, scale): (f64, f64)) {
        self.samples += 1;
        self.max_residual = self.max_residual.max(residual);
        self.max_relative = self.max_relative.max(residual / scale.max(1.0));
    }
}

/// `‖A·S(x) − S(x)·A* − Π(x)·j·Π(x)*‖_F` at every grid point.
pub fn identity_sweep(c: &Construction, grid: &Grid1) -> Result<IdentitySweep> {
    let mut sweep = IdentitySweep::new();
    for x in grid.points() {
        sweep.push(c.identity_residual(x)?);
    }
    Ok(sweep)
}

/// The `(x, t)` version of [`identity_sweep`].
pub fn kdv_identity_sweep(c: &KdvConstruction, grid: &Grid2) -> Result<IdentitySweep> {
    let mut sweep = IdentitySweep::new();
    for t in grid.t.points() {
        for x in grid.x.points() {
            sweep.push(c.identity_residual(x, t)?);
        }
    }
    Ok(sweep)
}

/// Solves `PZ + ZR = C` by assembling the full `(n·k)`-dimensional linear
/// system entry by entry. Test oracle only.
pub fn brute_force_sylvester(p: &ComplexMatrix, r: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    p.require_square("P")?;
    r.require_square("R")?;
    let (n, k) = (p.rows(), r.rows());
    c.require_shape(n, k, "C")?;
    if n > 6 || k > 6 {
        return Err(GbdtError::ShapeMismatch(format!("brute force limited to size 6, got {n}x{k}")));
    }
    let dim = n * k;
    let mut system = ComplexMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..k {
            let row = i * k + j;
            for l in 0..n {
                system[(row, l * k + j)] += p[(i, l)];
            }
            for l in 0..k {
                system[(row, i * k + l)] += r[(l, j)];
            }
        }
    }
    let rhs = ComplexMatrix::from_fn(dim, 1, |row, _| c[(row / k, row % k)]);
    let z = system.solve(&rhs).map_err(|_| GbdtError::SingularSystem)?;
    let mut out = ComplexMatrix::zeros(n, k);
    for row in 0..dim {
        out[(row / k, row % k)] = z[(row, 0)];
    }
    if !out.is_finite() {
        return Err(GbdtError::SingularSystem);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    #[test]
    fn diagonal_entrywise() {
        let p = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let r = ComplexMatrix::from_real(&[&[3.0, 0.0], &[0.0, 4.0]]);
        let c = ComplexMatrix::from_real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let z = brute_force_sylvester(&p, &r, &c).unwrap();
        for (i, pi) in [1.0, 2.0].iter().enumerate() {
            for (j, rj) in [3.0, 4.0].iter().enumerate() {
                assert!((z[(i, j)] - C64::new(1.0 / (pi + rj), 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn overlapping_spectra() {
        let e = brute_force_sylvester(
            &ComplexMatrix::from_real(&[&[1.0]]),
            &ComplexMatrix::from_real(&[&[-1.0]]),
            &ComplexMatrix::from_real(&[&[1.0]]),
        );
        assert_eq!(e, Err(GbdtError::SingularSystem));
    }
}
