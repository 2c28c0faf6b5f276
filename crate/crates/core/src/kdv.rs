//! Matrix KdV solutions: the construction extended to `(x, t)`.
//!
//! The eigenfunction blocks carry the phase `Θ = xQ + 4tQ³`, and `S(x, t)`
//! solves `∂S/∂x = Λ2Λ2*`, `∂S/∂t = 4(AΛ2Λ2* + Λ2Λ2*A* + Λ1Λ1*)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GbdtError, Result};
use crate::matfun::expm;
use crate::matrix::{ComplexMatrix, I};
use crate::quadrature::{integrate, QuadratureControls};
use crate::tolerances::Tolerances;
use crate::transform::{
    check_invertible, identity_defect, identity_scale, potential_from_parts, validate_triple, ClosedFormParts,
    Dressing, SMatrixEngine, SMode, TripleReport,
};
use crate::verify::Grid2;

/// A dressing whose triple satisfies the identity at `(0, 0)`.
#[derive(Debug, Clone)]
pub struct KdvDressing {
    dressing: Dressing,
    report: TripleReport,
}

impl KdvDressing {
    pub fn new(dressing: Dressing, tol: &Tolerances) -> Result<Self> {
        let report = validate_triple(dressing.triple(), tol);
        if !report.passed {
            return Err(GbdtError::InvalidParameter(format!(
                "triple violates the identity at (0, 0): residual {:.3e}, hermitian residual {:.3e}",
                report.identity_residual, report.hermitian_residual
            )));
        }
        Ok(KdvDressing { dressing, report })
    }

    pub fn dressing(&self) -> &Dressing {
        &self.dressing
    }

    pub fn report(&self) -> &TripleReport {
        &self.report
    }
}

/// Which leg of the L-shaped integration path comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    /// `t`-leg along `x = 0`, then `x`-leg at fixed `t`.
    TimeFirst,
    /// `x`-leg along `t = 0`, then `t`-leg at fixed `x`.
    SpaceFirst,
}

#[derive(Debug, Clone)]
pub struct KdvConstruction {
    dressing: Dressing,
    q_cubed: ComplexMatrix,
    closed_form: Option<ClosedFormParts>,
    x_controls: QuadratureControls,
    t_controls: QuadratureControls,
    tol: Tolerances,
}

impl KdvConstruction {
    pub fn new(kdv: KdvDressing, tol: &Tolerances) -> Self {
        let engine = SMatrixEngine::build(&kdv.dressing, tol);
        Self::from_engine(kdv, engine, tol)
    }

    /// Always integrates along the path, even when the closed form exists.
    pub fn quadrature_only(kdv: KdvDressing, tol: &Tolerances) -> Self {
        let engine = SMatrixEngine::quadrature(&kdv.dressing, tol);
        Self::from_engine(kdv, engine, tol)
    }

    fn from_engine(kdv: KdvDressing, engine: SMatrixEngine, tol: &Tolerances) -> Self {
        let q = kdv.dressing.q();
        let q_cubed = &(q * q) * q;
        let x_controls = *engine.quadrature_controls();
        let t_controls = QuadratureControls {
            frequency: 8.0 * q_cubed.norm_fro(),
            ..x_controls
        };
        KdvConstruction {
            closed_form: engine.closed_form_parts().cloned(),
            dressing: kdv.dressing,
            q_cubed,
            x_controls,
            t_controls,
            tol: *tol,
        }
    }

    pub fn dressing(&self) -> &Dressing {
        &self.dressing
    }

    pub fn mode(&self) -> SMode {
        if self.closed_form.is_some() {
            SMode::ClosedForm
        } else {
            SMode::Quadrature
        }
    }

    fn phase(&self, x: f64, t: f64) -> ComplexMatrix {
        &self.dressing.q().scale_real(x) + &self.q_cubed.scale_real(4.0 * t)
    }

    pub fn lambda_pair(&self, x: f64, t: f64) -> (ComplexMatrix, ComplexMatrix) {
        self.dressing.lambda_pair_for_phase(&self.phase(x, t))
    }

    pub fn pi(&self, x: f64, t: f64) -> ComplexMatrix {
        let (l1, l2) = self.lambda_pair(x, t);
        ComplexMatrix::hstack(&l1, &l2)
    }

    /// `4(AΛ2Λ2* + Λ2Λ2*A* + Λ1Λ1*)`, the `t`-derivative of `S`.
    fn time_integrand(&self, x: f64, t: f64) -> ComplexMatrix {
        let a = self.dressing.triple().a();
        let (l1, l2) = self.lambda_pair(x, t);
        let g = &l2 * &l2.adjoint();
        let mut sum = a * &g;
        sum += &(&g * &a.adjoint());
        sum += &(&l1 * &l1.adjoint());
        sum.scale_real(4.0)
    }

    fn space_integrand(&self, x: f64, t: f64) -> ComplexMatrix {
        let (_, l2) = self.lambda_pair(x, t);
        &l2 * &l2.adjoint()
    }

    pub fn s_matrix(&self, x: f64, t: f64) -> Result<ComplexMatrix> {
        if x == 0.0 && t == 0.0 {
            return Ok(self.dressing.triple().s0().clone());
        }
        match &self.closed_form {
            Some(parts) => {
                let phase = self.phase(x, t);
                Ok(parts.gram(&expm(&phase.scale(I)), &expm(&phase.scale(-I))))
            }
            None => self.s_matrix_path(x, t, PathOrder::TimeFirst),
        }
    }

    /// `S(x, t)` by quadrature along an L-shaped path from `(0, 0)`.
    pub fn s_matrix_path(&self, x: f64, t: f64, order: PathOrder) -> Result<ComplexMatrix> {
        let mut s = self.dressing.triple().s0().clone();
        match order {
            PathOrder::TimeFirst => {
                if t != 0.0 {
                    s += &integrate(|tau| Ok(self.time_integrand(0.0, tau)), 0.0, t, &self.t_controls)?;
                }
                if x != 0.0 {
                    s += &integrate(|xi| Ok(self.space_integrand(xi, t)), 0.0, x, &self.x_controls)?;
                }
            }
            PathOrder::SpaceFirst => {
                if x != 0.0 {
                    s += &integrate(|xi| Ok(self.space_integrand(xi, 0.0)), 0.0, x, &self.x_controls)?;
                }
                if t != 0.0 {
                    s += &integrate(|tau| Ok(self.time_integrand(x, tau)), 0.0, t, &self.t_controls)?;
                }
            }
        }
        Ok(s.hermitian_part())
    }

    pub fn potential(&self, x: f64, t: f64) -> Result<ComplexMatrix> {
        let s = self.s_matrix(x, t)?;
        check_invertible(&s, x, t, &self.tol)?;
        let (l1, l2) = self.lambda_pair(x, t);
        potential_from_parts(&s, &l1, &l2, x, t)
    }

    /// `‖A·S − S·A* − Π·j·Π*‖_F` at `(x, t)` and its reference scale.
    pub fn identity_residual(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        let s = self.s_matrix(x, t)?;
        let pi = self.pi(x, t);
        let a = self.dressing.triple().a();
        Ok((identity_defect(a, &s, &pi).norm_fro(), identity_scale(a, &s, &pi)))
    }

    /// Samples `ũ` on a grid, rows of constant `t` evaluated in parallel.
    pub fn sample(&self, grid: &Grid2) -> Result<KdvField> {
        let xs = grid.x.points();
        let ts = grid.t.points();
        let rows: Vec<Vec<Result<ComplexMatrix>>> = ts
            .par_iter()
            .map(|&t| xs.iter().map(|&x| self.potential(x, t)).collect())
            .collect();
        let mut values = Vec::with_capacity(xs.len() * ts.len());
        let mut singular = Vec::new();
        for (k, row) in rows.into_iter().enumerate() {
            for (i, v) in row.into_iter().enumerate() {
                match v {
                    Ok(u) => values.push(Some(u)),
                    Err(e) if e.is_singular_point() => {
                        singular.push((xs[i], ts[k]));
                        values.push(None);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(KdvField {
            xs,
            ts,
            values,
            singular,
        })
    }
}

/// `ũ(x, t)` on a grid; `values` is row-major in `t` (outer) and `x` (inner).
#[derive(Debug, Clone, Serialize)]
pub struct KdvField {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    #[serde(skip)]
    pub values: Vec<Option<ComplexMatrix>>,
    pub singular: Vec<(f64, f64)>,
}

impl KdvField {
    pub fn get(&self, ix: usize, it: usize) -> Option<&ComplexMatrix> {
        self.values[it * self.xs.len() + ix].as_ref()
    }
}
