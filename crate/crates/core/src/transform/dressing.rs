use crate::error::{GbdtError, Result};
use crate::matfun::{expm, sqrtm_with, svd};
use crate::matrix::{ComplexMatrix, I};
use crate::tolerances::Tolerances;
use crate::transform::triple::Triple;

/// A square root `Q` of `A` together with `f1`, `f2` reproducing `Π(0)`:
/// `−iQ(f1 − f2) = θ1`, `f1 + f2 = θ2`.
#[derive(Debug, Clone)]
pub struct Dressing {
    q: ComplexMatrix,
    f1: ComplexMatrix,
    f2: ComplexMatrix,
    triple: Triple,
}

fn root_residual(q: &ComplexMatrix, a: &ComplexMatrix) -> f64 {
    (&(q * q) - a).norm_fro()
}

impl Dressing {
    /// Builds the dressing for `triple`.
    ///
    /// Without `q_supplied`, `Q` is the principal square root of `A` (which
    /// must then be invertible). With an invertible `Q`, `f1` and `f2` follow
    /// in closed form; with a singular supplied `Q` they are the
    /// minimum-norm solution of the linear conditions.
    pub fn new(triple: Triple, q_supplied: Option<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let n = triple.n();
        let a = triple.a();
        let q = match q_supplied {
            Some(q) => {
                q.require_shape(n, n, "Q")?;
                let residual = root_residual(&q, a);
                if residual > tol.root_tol * a.norm_fro().max(1.0) {
                    return Err(GbdtError::InconsistentRoot { residual });
                }
                q
            }
            None => sqrtm_with(a, tol)?,
        };

        let q_svd = svd(&q);
        let (f1, f2) = if q_svd.rcond() >= tol.rank_tol {
            // f1,2 = (θ2 ± iQ⁻¹θ1) / 2
            let q_inv_theta1 = q.solve(triple.theta1())?.scale(I);
            let f1 = (triple.theta2() + &q_inv_theta1).scale_real(0.5);
            let f2 = (triple.theta2() - &q_inv_theta1).scale_real(0.5);
            (f1, f2)
        } else {
            minimum_norm_amplitudes(&q, &triple, tol)?
        };
        Dressing::from_parts(triple, q, f1, f2, tol)
    }

    /// Accepts explicitly chosen `Q`, `f1`, `f2` after checking `Q² = A` and
    /// the initial-value conditions.
    pub fn from_parts(
        triple: Triple,
        q: ComplexMatrix,
        f1: ComplexMatrix,
        f2: ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let (n, h) = (triple.n(), triple.h());
        q.require_shape(n, n, "Q")?;
        f1.require_shape(n, h, "f1")?;
        f2.require_shape(n, h, "f2")?;
        let residual = root_residual(&q, triple.a());
        if residual > tol.root_tol * triple.a().norm_fro().max(1.0) {
            return Err(GbdtError::InconsistentRoot { residual });
        }
        let d = Dressing { q, f1, f2, triple };
        let residual = d.initial_value_residual();
        let scale = d.triple.pi0().norm_fro().max(1.0);
        if residual > tol.root_tol * scale {
            return Err(GbdtError::NoDressing { residual });
        }
        Ok(d)
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn f1(&self) -> &ComplexMatrix {
        &self.f1
    }

    pub fn f2(&self) -> &ComplexMatrix {
        &self.f2
    }

    pub fn triple(&self) -> &Triple {
        &self.triple
    }

    /// `‖−iQ(f1 − f2) − θ1‖_F + ‖f1 + f2 − θ2‖_F`.
    pub fn initial_value_residual(&self) -> f64 {
        let diff = &self.f1 - &self.f2;
        let l1 = (&self.q * &diff).scale(-I);
        let l2 = &self.f1 + &self.f2;
        (&l1 - self.triple.theta1()).norm_fro() + (&l2 - self.triple.theta2()).norm_fro()
    }

    /// `(Λ1, Λ2)` for a general phase matrix `Θ` commuting with `Q`:
    /// `Λ1 = −iQ(e^{iΘ}f1 − e^{−iΘ}f2)`, `Λ2 = e^{iΘ}f1 + e^{−iΘ}f2`.
    pub(crate) fn lambda_pair_for_phase(&self, phase: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        let e_plus = expm(&phase.scale(I));
        let e_minus = expm(&phase.scale(-I));
        let up = &e_plus * &self.f1;
        let down = &e_minus * &self.f2;
        let lambda1 = (&self.q * &(&up - &down)).scale(-I);
        let lambda2 = &up + &down;
        (lambda1, lambda2)
    }

    /// Generalised eigenfunction blocks at `x`.
    pub fn lambda_pair(&self, x: f64) -> (ComplexMatrix, ComplexMatrix) {
        self.lambda_pair_for_phase(&self.q.scale_real(x))
    }

    /// Same blocks from `[Λ1; Λ2] = exp(x·[[0, A], [−I, 0]])·[θ1; θ2]`.
    /// Independent of `Q`; kept as a cross-check.
    pub fn lambda_pair_blockexp(&self, x: f64) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.triple.n();
        let mut generator = ComplexMatrix::zeros(2 * n, 2 * n);
        generator.set_block(0, n, self.triple.a());
        generator.set_block(n, 0, &ComplexMatrix::identity(n).scale_real(-1.0));
        let stacked = ComplexMatrix::vstack(self.triple.theta1(), self.triple.theta2());
        let out = &expm(&generator.scale_real(x)) * &stacked;
        let h = self.triple.h();
        (out.block(0, 0, n, h), out.block(n, 0, n, h))
    }

    /// `Π(x) = [Λ1(x) Λ2(x)]`.
    pub fn pi(&self, x: f64) -> ComplexMatrix {
        let (l1, l2) = self.lambda_pair(x);
        ComplexMatrix::hstack(&l1, &l2)
    }
}

/// Minimum-norm `[f1; f2]` solving `[[−iQ, iQ], [I, I]]·[f1; f2] = [θ1; θ2]`.
fn minimum_norm_amplitudes(
    q: &ComplexMatrix,
    triple: &Triple,
    tol: &Tolerances,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = triple.n();
    let h = triple.h();
    let mut system = ComplexMatrix::zeros(2 * n, 2 * n);
    let iq = q.scale(I);
    system.set_block(0, 0, &iq.scale_real(-1.0));
    system.set_block(0, n, &iq);
    system.set_block(n, 0, &ComplexMatrix::identity(n));
    system.set_block(n, n, &ComplexMatrix::identity(n));
    let rhs = ComplexMatrix::vstack(triple.theta1(), triple.theta2());
    let sol = svd(&system).pinv_solve(&rhs, tol.rank_tol.max(1e-13));
    let residual = (&(&system * &sol) - &rhs).norm_fro();
    if residual > tol.root_tol * rhs.norm_fro().max(1.0) {
        return Err(GbdtError::NoDressing { residual });
    }
    Ok((sol.block(0, 0, n, h), sol.block(n, 0, n, h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{C64, ONE};

    fn scalar(v: f64) -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[v]])
    }

    #[test]
    fn zero_root_splits_theta2_evenly() {
        let theta2 = ComplexMatrix::from_rows(&[vec![C64::new(1.0, 2.0)], vec![C64::new(-0.5, 0.0)]]).unwrap();
        let t = Triple::new(
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::identity(2),
            ComplexMatrix::zeros(2, 1),
            theta2.clone(),
        )
        .unwrap();
        let d = Dressing::new(t, Some(ComplexMatrix::zeros(2, 2)), &Tolerances::default()).unwrap();
        let half = theta2.scale_real(0.5);
        assert!((d.f1() - &half).norm_fro() < 1e-15);
        assert!((d.f2() - &half).norm_fro() < 1e-15);
    }

    #[test]
    fn nilpotent_root_matches_linear_conditions() {
        let (b, c) = (1.5, -0.7);
        let t = Triple::new(
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::from_real(&[&[0.0, 0.0], &[0.0, 2.0]]),
            ComplexMatrix::from_real(&[&[b], &[0.0]]),
            ComplexMatrix::from_real(&[&[c], &[0.0]]),
        )
        .unwrap();
        let q = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let d = Dressing::new(t, Some(q), &Tolerances::default()).unwrap();
        let ib2 = C64::new(0.0, b / 2.0);
        assert!((d.f1()[(1, 0)] - ib2).norm() < 1e-14);
        assert!((d.f2()[(1, 0)] + ib2).norm() < 1e-14);
        assert!((d.f1()[(0, 0)] + d.f2()[(0, 0)] - C64::new(c, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn scalar_cosine_dressing() {
        let t = Triple::new(scalar(1.0), scalar(1.0), scalar(0.0), scalar(1.0)).unwrap();
        let d = Dressing::new(t, None, &Tolerances::default()).unwrap();
        assert!((d.q()[(0, 0)] - ONE).norm() < 1e-15);
        assert!((d.f1()[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((d.f2()[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15);
        for &x in &[0.0, 0.4, -2.5] {
            let (l1, l2) = d.lambda_pair(x);
            assert!((l1[(0, 0)] - C64::new(f64::sin(x), 0.0)).norm() < 1e-14);
            assert!((l2[(0, 0)] - C64::new(f64::cos(x), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_root_and_singular_a() {
        let t = Triple::new(scalar(4.0), scalar(1.0), scalar(0.0), scalar(1.0)).unwrap();
        let e = Dressing::new(t, Some(scalar(3.0)), &Tolerances::default()).unwrap_err();
        assert!(matches!(e, GbdtError::InconsistentRoot { .. }));
        let t = Triple::new(scalar(0.0), scalar(1.0), scalar(0.0), scalar(1.0)).unwrap();
        let e = Dressing::new(t, None, &Tolerances::default()).unwrap_err();
        assert!(matches!(e, GbdtError::SingularMatrix { .. }));
    }

    #[test]
    fn inconsistent_system_for_singular_root() {
        // Q = 0 cannot produce a nonzero θ1
        let t = Triple::new(scalar(0.0), scalar(1.0), scalar(1.0), scalar(1.0)).unwrap();
        let e = Dressing::new(t, Some(scalar(0.0)), &Tolerances::default()).unwrap_err();
        assert!(matches!(e, GbdtError::NoDressing { .. }));
    }
}
