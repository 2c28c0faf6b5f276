use thiserror::Error;

pub type Result<T> = std::result::Result<T, GbdtError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GbdtError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is numerically singular (sigma_min / sigma_max = {rcond:.3e})")]
    SingularMatrix { rcond: f64 },

    #[error("square-root recurrence hit a vanishing pivot at ({row}, {col})")]
    NoRootFound { row: usize, col: usize },

    #[error("Schur iteration did not converge after {iterations} iterations")]
    SchurNoConvergence { iterations: usize },

    #[error("Sylvester spectra overlap: separation {separation:.3e} below tolerance")]
    SpectraOverlap { separation: f64 },

    #[error("lambda = {re} + {im}i is a spectral point (distance {distance:.3e})")]
    SpectralPoint { re: f64, im: f64, distance: f64 },

    #[error("supplied root does not square to A (residual {residual:.3e})")]
    InconsistentRoot { residual: f64 },

    #[error("dressing system for f1, f2 is inconsistent (residual {residual:.3e})")]
    NoDressing { residual: f64 },

    #[error("S is numerically singular at x = {x}, t = {t} (rcond = {rcond:.3e})")]
    SingularS { x: f64, t: f64, rcond: f64 },

    #[error("adaptive quadrature failed on [{a}, {b}] (estimated error {estimate:.3e})")]
    QuadratureFailure { a: f64, b: f64, estimate: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("Kronecker system is singular")]
    SingularSystem,

    #[error("gamma(x) vanishes at x = {x}")]
    SingularGamma { x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl GbdtError {
    /// True for errors that mark a singular point of the construction
    /// rather than a failure of the computation itself.
    pub fn is_singular_point(&self) -> bool {
        matches!(self, GbdtError::SingularS { .. } | GbdtError::SingularGamma { .. })
    }
}
