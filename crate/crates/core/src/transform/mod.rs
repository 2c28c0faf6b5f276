//! The stationary construction: parameter triple, dressing, `S(x)`, the
//! transformed potential, the transfer matrix function and the transformed
//! stationary and dynamical solutions.

mod dressing;
mod smatrix;
mod solution;
mod triple;

pub use dressing::Dressing;
pub use smatrix::{ClosedFormParts, SMatrixEngine, SMode};
pub use solution::{free_solution, Construction, SolutionRequest};
pub use triple::{identity_defect, identity_scale, j_matrix, validate_triple, Triple, TripleReport};

pub(crate) use solution::{check_invertible, potential_from_parts};
