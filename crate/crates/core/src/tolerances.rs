use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the construction pipeline.
///
/// `rank_tol`, `eigen_tol` and `cond_tol` are relative: they are multiplied by
/// the norm of the matrix they are applied to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// sigma_min / sigma_max below which a matrix counts as singular.
    pub rank_tol: f64,
    /// Relative distance below which two eigenvalues coincide.
    pub eigen_tol: f64,
    /// Relative separation below which the closed-form Gram matrix is
    /// abandoned in favour of quadrature.
    pub sylvester_sep_tol: f64,
    /// Relative residual allowed in the parameter identity.
    pub identity_tol: f64,
    /// Relative residual allowed for Q^2 = A and the dressing conditions.
    pub root_tol: f64,
    /// Reciprocal condition number of S below which a point is singular.
    pub cond_tol: f64,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-12,
            eigen_tol: 1e-12,
            sylvester_sep_tol: 1e-8,
            identity_tol: 1e-10,
            root_tol: 1e-10,
            cond_tol: 1e-12,
            quad_abs_tol: 1e-12,
            quad_rel_tol: 1e-10,
        }
    }
}
