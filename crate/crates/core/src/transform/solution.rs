use crate::error::{GbdtError, Result};
use crate::matfun::{expm, principal_sqrt, rcond, resolvent_with};
use crate::matrix::{ComplexMatrix, C64, I};
use crate::tolerances::Tolerances;
use crate::transform::dressing::Dressing;
use crate::transform::smatrix::{SMatrixEngine, SMode};
use crate::transform::triple::{identity_defect, identity_scale, j_matrix, Triple};

/// Spectral parameter, the principal `√λ` fixed once, and the constant
/// vector `f0 ∈ C^{2h}` selecting a free solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRequest {
    lambda: C64,
    sqrt_lambda: C64,
    f0: Vec<C64>,
}

impl SolutionRequest {
    pub fn new(lambda: C64, f0: Vec<C64>) -> Self {
        if lambda == C64::new(0.0, 0.0) {
            log::warn!("lambda = 0: the two exponential columns of W0 coincide");
        }
        SolutionRequest {
            lambda,
            sqrt_lambda: principal_sqrt(lambda),
            f0,
        }
    }

    /// Same `λ` and the very same `√λ` value, different `f0`.
    pub fn with_f0(&self, f0: Vec<C64>) -> Self {
        SolutionRequest {
            lambda: self.lambda,
            sqrt_lambda: self.sqrt_lambda,
            f0,
        }
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn sqrt_lambda(&self) -> C64 {
        self.sqrt_lambda
    }

    pub fn f0(&self) -> &[C64] {
        &self.f0
    }
}

/// `Y0 = W0(x, λ)·f0`: the free solution stacked with its derivative.
pub fn free_solution(x: f64, req: &SolutionRequest) -> Result<Vec<C64>> {
    let m = req.f0.len();
    if m == 0 || m % 2 != 0 {
        return Err(GbdtError::ShapeMismatch(format!("f0 must have even length, got {m}")));
    }
    let h = m / 2;
    let k = req.sqrt_lambda;
    let up = (I * k * x).exp();
    let down = (-I * k * x).exp();
    let mut y = Vec::with_capacity(m);
    for r in 0..h {
        y.push(up * req.f0[r] + down * req.f0[h + r]);
    }
    for r in 0..h {
        y.push(I * k * (up * req.f0[r] - down * req.f0[h + r]));
    }
    Ok(y)
}

/// A validated dressing paired with its `S(x)` engine; evaluates the
/// transformed potential and the transformed solutions.
#[derive(Debug, Clone)]
pub struct Construction {
    dressing: Dressing,
    engine: SMatrixEngine,
    tol: Tolerances,
}

impl Construction {
    pub fn new(dressing: Dressing, tol: &Tolerances) -> Self {
        let engine = SMatrixEngine::build(&dressing, tol);
        Construction {
            dressing,
            engine,
            tol: *tol,
        }
    }

    pub fn with_engine(dressing: Dressing, engine: SMatrixEngine, tol: &Tolerances) -> Self {
        Construction {
            dressing,
            engine,
            tol: *tol,
        }
    }

    pub fn from_triple(triple: Triple, q: Option<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        Ok(Self::new(Dressing::new(triple, q, tol)?, tol))
    }

    pub fn dressing(&self) -> &Dressing {
        &self.dressing
    }

    pub fn triple(&self) -> &Triple {
        self.dressing.triple()
    }

    pub fn engine(&self) -> &SMatrixEngine {
        &self.engine
    }

    pub fn mode(&self) -> SMode {
        self.engine.mode()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn s_matrix(&self, x: f64) -> Result<ComplexMatrix> {
        self.engine.s_matrix(x)
    }

    /// `S(x)` checked for invertibility; `SingularS` carries `x`.
    pub fn invertible_s(&self, x: f64) -> Result<ComplexMatrix> {
        let s = self.s_matrix(x)?;
        check_invertible(&s, x, 0.0, &self.tol)?;
        Ok(s)
    }

    /// `ũ(x) = 2(X12 + X21 + X22²)` with `X_ik = Λ_i* S⁻¹ Λ_k`.
    pub fn potential(&self, x: f64) -> Result<ComplexMatrix> {
        let s = self.invertible_s(x)?;
        let (l1, l2) = self.dressing.lambda_pair(x);
        potential_from_parts(&s, &l1, &l2, x, 0.0)
    }

    /// `w_A(x, λ) = I_m − jΠ(x)*S(x)⁻¹(A − λI)⁻¹Π(x)`.
    pub fn transfer_matrix(&self, x: f64, lambda: C64) -> Result<ComplexMatrix> {
        let s = self.invertible_s(x)?;
        let res = resolvent_with(self.triple().a(), lambda, &self.tol)?;
        let pi = self.dressing.pi(x);
        let m = pi.cols();
        let inner = s.solve(&(&res * &pi)).map_err(|_| singular_s(x, 0.0, 0.0))?;
        let correction = &(&j_matrix(m / 2) * &pi.adjoint()) * &inner;
        Ok(&ComplexMatrix::identity(m) - &correction)
    }

    /// `ỹ(x, λ) = [I_h 0]·w_A(x, λ)·W0(x, λ)·f0`.
    pub fn transformed_solution(&self, x: f64, req: &SolutionRequest) -> Result<Vec<C64>> {
        let m = self.triple().m();
        if req.f0.len() != m {
            return Err(GbdtError::ShapeMismatch(format!(
                "f0 has length {}, expected {m}",
                req.f0.len()
            )));
        }
        let w = self.transfer_matrix(x, req.lambda)?;
        let y0 = ComplexMatrix::column_vector(&free_solution(x, req)?);
        let full = &w * &y0;
        Ok((0..m / 2).map(|r| full[(r, 0)]).collect())
    }

    /// `ψ̃(x, t) = [0 I_h]·Π(x)*·S(x)⁻¹·e^{−itA}`, an h×n matrix.
    pub fn dynamic_solution(&self, x: f64, t: f64) -> Result<ComplexMatrix> {
        let profile = self.dynamic_profile(x)?;
        Ok(&profile * &expm(&self.triple().a().scale(C64::new(0.0, -t))))
    }

    /// The `t = 0` slice `Λ2(x)*·S(x)⁻¹`.
    pub fn dynamic_profile(&self, x: f64) -> Result<ComplexMatrix> {
        let s = self.invertible_s(x)?;
        let (_, l2) = self.dressing.lambda_pair(x);
        // S is Hermitian, so Λ2* S⁻¹ = (S⁻¹ Λ2)*
        Ok(s.solve(&l2).map_err(|_| singular_s(x, 0.0, 0.0))?.adjoint())
    }

    /// `‖A·S(x) − S(x)·A* − Π(x)·j·Π(x)*‖_F` and the scale it is measured against.
    pub fn identity_residual(&self, x: f64) -> Result<(f64, f64)> {
        let s = self.s_matrix(x)?;
        let pi = self.dressing.pi(x);
        let a = self.triple().a();
        Ok((identity_defect(a, &s, &pi).norm_fro(), identity_scale(a, &s, &pi)))
    }
}

pub(crate) fn singular_s(x: f64, t: f64, rcond: f64) -> GbdtError {
    GbdtError::SingularS { x, t, rcond }
}

pub(crate) fn check_invertible(s: &ComplexMatrix, x: f64, t: f64, tol: &Tolerances) -> Result<()> {
    let rc = rcond(s);
    if !(rc >= tol.cond_tol) {
        return Err(singular_s(x, t, rc));
    }
    Ok(())
}

pub(crate) fn potential_from_parts(
    s: &ComplexMatrix,
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    x: f64,
    t: f64,
) -> Result<ComplexMatrix> {
    let pi = ComplexMatrix::hstack(l1, l2);
    let h = l1.cols();
    let s_inv_pi = s.solve(&pi).map_err(|_| singular_s(x, t, 0.0))?;
    let big_x = &pi.adjoint() * &s_inv_pi;
    let x12 = big_x.block(0, h, h, h);
    let x21 = big_x.block(h, 0, h, h);
    let x22 = big_x.block(h, h, h, h);
    let sum = &(&x12 + &x21) + &(&x22 * &x22);
    Ok(sum.scale_real(2.0))
}
