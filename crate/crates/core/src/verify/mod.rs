//! Independent checks of every construction: finite-difference residuals of
//! the target equations, the algebraic identity along `x` and `(x, t)`, and
//! brute-force recomputations used as oracles.

mod grid;
mod oracles;
mod residual;

pub use grid::{Grid1, Grid2, GridSpec};
pub use oracles::{brute_force_sylvester, identity_sweep, kdv_identity_sweep, IdentitySweep};
pub use residual::{
    dynamic_residual, kdv_residual, schrodinger_residual, Point, ResidualReport, ResidualTolerance, SkippedPoint,
    DYNAMIC_TOLERANCE, KDV_TOLERANCE, SCHRODINGER_TOLERANCE,
};
