//! The Gram-type matrix `S(x) = S(0) + ∫₀ˣ Λ2(ξ)Λ2(ξ)* dξ`.
//!
//! When the three Sylvester equations
//!
//! ```text
//!  i(Q·Z1 − Z1·Q*) = f1·f1*,   i(Q·Z2 + Z2·Q*) = f1·f2*,   −i(Q·Z3 − Z3·Q*) = f2·f2*
//! ```
//!
//! are uniquely solvable, `S` is a finite sum of exponential sandwiches of
//! the `Z_k` plus a constant Hermitian offset fixing `S(0)`. Otherwise the
//! integral is evaluated by adaptive Gauss–Legendre quadrature.

use serde::Serialize;

use crate::error::Result;
use crate::matfun::{expm, solve_sylvester_with};
use crate::matrix::{ComplexMatrix, I};
use crate::quadrature::{integrate, QuadratureControls};
use crate::tolerances::Tolerances;
use crate::transform::dressing::Dressing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SMode {
    ClosedForm,
    Quadrature,
}

impl std::fmt::Display for SMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SMode::ClosedForm => "closed_form",
            SMode::Quadrature => "quadrature",
        })
    }
}

/// Solutions of the three Sylvester equations and the offset
/// `D = S0 − (Z1 + Z2 + Z2* + Z3)`.
#[derive(Debug, Clone)]
pub struct ClosedFormParts {
    pub z1: ComplexMatrix,
    pub z2: ComplexMatrix,
    pub z3: ComplexMatrix,
    pub offset: ComplexMatrix,
}

impl ClosedFormParts {
    /// `e⁺Z1e⁺* + e⁺Z2e⁻* + e⁻Z2*e⁺* + e⁻Z3e⁻* + D` with `e± = exp(±iΘ)`.
    pub fn gram(&self, e_plus: &ComplexMatrix, e_minus: &ComplexMatrix) -> ComplexMatrix {
        let ep_star = e_plus.adjoint();
        let em_star = e_minus.adjoint();
        let cross = &(e_plus * &self.z2) * &em_star;
        let mut s = &(e_plus * &self.z1) * &ep_star;
        s += &(&(e_minus * &self.z3) * &em_star);
        s += &cross;
        s += &cross.adjoint();
        s += &self.offset;
        s.hermitian_part()
    }
}

#[derive(Debug, Clone)]
pub struct SMatrixEngine {
    dressing: Dressing,
    closed_form: Option<ClosedFormParts>,
    quadrature: QuadratureControls,
}

impl SMatrixEngine {
    /// Closed form when all three Sylvester equations are solvable with
    /// separation above `tol.sylvester_sep_tol`, quadrature otherwise.
    pub fn build(dressing: &Dressing, tol: &Tolerances) -> Self {
        let closed_form = closed_form_parts(dressing, tol);
        SMatrixEngine {
            dressing: dressing.clone(),
            closed_form,
            quadrature: quadrature_controls(dressing, tol),
        }
    }

    /// Forces quadrature mode regardless of solvability.
    pub fn quadrature(dressing: &Dressing, tol: &Tolerances) -> Self {
        SMatrixEngine {
            dressing: dressing.clone(),
            closed_form: None,
            quadrature: quadrature_controls(dressing, tol),
        }
    }

    pub fn mode(&self) -> SMode {
        if self.closed_form.is_some() {
            SMode::ClosedForm
        } else {
            SMode::Quadrature
        }
    }

    pub fn closed_form_parts(&self) -> Option<&ClosedFormParts> {
        self.closed_form.as_ref()
    }

    pub fn quadrature_controls(&self) -> &QuadratureControls {
        &self.quadrature
    }

    pub fn dressing(&self) -> &Dressing {
        &self.dressing
    }

    pub fn s_matrix(&self, x: f64) -> Result<ComplexMatrix> {
        let s0 = self.dressing.triple().s0();
        if x == 0.0 {
            return Ok(s0.clone());
        }
        match &self.closed_form {
            Some(parts) => {
                let phase = self.dressing.q().scale_real(x);
                Ok(parts.gram(&expm(&phase.scale(I)), &expm(&phase.scale(-I))))
            }
            None => {
                let integral = integrate(
                    |xi| {
                        let (_, l2) = self.dressing.lambda_pair(xi);
                        Ok(&l2 * &l2.adjoint())
                    },
                    0.0,
                    x,
                    &self.quadrature,
                )?;
                Ok((s0 + &integral).hermitian_part())
            }
        }
    }
}

fn quadrature_controls(dressing: &Dressing, tol: &Tolerances) -> QuadratureControls {
    QuadratureControls {
        abs_tol: tol.quad_abs_tol,
        rel_tol: tol.quad_rel_tol,
        frequency: 2.0 * dressing.q().norm_fro(),
    }
}

fn closed_form_parts(d: &Dressing, tol: &Tolerances) -> Option<ClosedFormParts> {
    let q = d.q();
    let q_star = q.adjoint();
    let neg_q_star = q_star.scale_real(-1.0);
    let (f1, f2) = (d.f1(), d.f2());
    let sep = tol.sylvester_sep_tol;
    // Q Z1 − Z1 Q* = −i f1 f1*
    let z1 = solve_sylvester_with(q, &neg_q_star, &(f1 * &f1.adjoint()).scale(-I), sep).ok()?;
    // Q Z2 + Z2 Q* = −i f1 f2*
    let z2 = solve_sylvester_with(q, &q_star, &(f1 * &f2.adjoint()).scale(-I), sep).ok()?;
    // Q Z3 − Z3 Q* = i f2 f2*
    let z3 = solve_sylvester_with(q, &neg_q_star, &(f2 * &f2.adjoint()).scale(I), sep).ok()?;
    let z1 = z1.hermitian_part();
    let z3 = z3.hermitian_part();
    let at_zero = &(&(&z1 + &z2) + &z2.adjoint()) + &z3;
    let offset = (d.triple().s0() - &at_zero).hermitian_part();
    Some(ClosedFormParts { z1, z2, z3, offset })
}
