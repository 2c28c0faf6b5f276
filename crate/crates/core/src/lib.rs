//! Explicit solutions of the matrix Schrödinger, dynamical Schrödinger and
//! matrix KdV equations by a generalised Bäcklund–Darboux transformation of
//! the trivial system, with independent numerical verification.
//!
//! The pipeline is `Triple` → `Dressing` (a square root `Q` of `A`) →
//! `SMatrixEngine` (`S(x)` in closed form or by quadrature) →
//! `Construction` / `KdvConstruction`, which evaluate potentials and
//! solutions. [`verify`] holds the residual oracles and [`catalog`] the
//! worked examples with known closed forms.

pub mod catalog;
pub mod corpus;
mod error;
pub mod kdv;
pub mod matfun;
mod matrix;
pub mod quadrature;
mod tolerances;
pub mod transform;
pub mod verify;

pub use error::{GbdtError, Result};
pub use kdv::{KdvConstruction, KdvDressing, KdvField, PathOrder};
pub use matrix::{ComplexMatrix, Lu, C64, I, ONE, ZERO};
pub use tolerances::Tolerances;
pub use transform::{
    free_solution, identity_defect, identity_scale, j_matrix, validate_triple, ClosedFormParts, Construction,
    Dressing, SMatrixEngine, SMode, SolutionRequest, Triple, TripleReport,
};
