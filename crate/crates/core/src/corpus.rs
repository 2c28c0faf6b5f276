//! Seeded random parameter triples that satisfy the identity by
//! construction, for property tests and the acceptance suite.
//!
//! `A = U·diag(μ)·U⁻¹` with eigenvalues kept off the real axis and away from
//! each other's conjugates, so `S(0)` is the unique (Hermitian) solution of
//! `A·S0 − S0·A* = Π(0)·j·Π(0)*` and the closed-form `S(x)` applies.
//!
//! Such an `S(x)` always crosses a singular point on the real line (its
//! derivative `Λ2Λ2*` grows in both directions). Corpus members are
//! therefore re-based at a point `x0` where `S(x0)` is positive definite:
//! `{A, S(x0), Π(x0)}` is again a valid triple and, `S` being nondecreasing,
//! its `S(x)` is invertible for every `x ≥ 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GbdtError, Result};
use crate::kdv::{KdvConstruction, KdvDressing};
use crate::matfun::{eigenvalues, rcond, solve_sylvester};
use crate::matrix::{ComplexMatrix, C64};
use crate::tolerances::Tolerances;
use crate::transform::{j_matrix, Construction, Dressing, Triple};

/// Smallest `|Im μ|` and smallest `|μ_i − conj(μ_k)|` among eigenvalues.
const SPECTRAL_GAP: f64 = 0.3;
const MAX_ATTEMPTS: usize = 500;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex(rng: &mut impl Rng, radius: f64) -> C64 {
    C64::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, radius: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng, radius))
}

/// Random invertible matrix with `rcond ≥ 0.05`.
pub fn random_invertible(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    loop {
        let m = random_matrix(rng, n, n, 1.0).add_identity(C64::new(1.5, 0.0));
        if rcond(&m) >= 0.05 {
            return m;
        }
    }
}

fn random_spectrum(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    let mut mu: Vec<C64> = Vec::with_capacity(n);
    while mu.len() < n {
        let r = rng.random_range(0.4..2.0);
        let arg = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let z = C64::from_polar(r, arg);
        if z.im.abs() < SPECTRAL_GAP {
            continue;
        }
        if mu.iter().any(|w| (z - w.conj()).norm() < SPECTRAL_GAP || (z - w).norm() < SPECTRAL_GAP) {
            continue;
        }
        mu.push(z);
    }
    mu
}

/// `A` with a prescribed spectrum in a random basis.
pub fn random_a(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let u = random_invertible(rng, n);
    let d = ComplexMatrix::diag(&random_spectrum(rng, n));
    let u_inv = u.inverse().expect("basis is well conditioned");
    &(&u * &d) * &u_inv
}

/// A triple with invertible `A` whose `S(0)` solves the identity exactly up
/// to rounding.
pub fn random_triple(rng: &mut impl Rng, n: usize, h: usize) -> Result<Triple> {
    let a = random_a(rng, n);
    let theta1 = random_matrix(rng, n, h, 1.0);
    let theta2 = random_matrix(rng, n, h, 1.0);
    let pi0 = ComplexMatrix::hstack(&theta1, &theta2);
    let rhs = &(&pi0 * &j_matrix(h)) * &pi0.adjoint();
    let s0 = solve_sylvester(&a, &a.adjoint().scale_real(-1.0), &rhs)?.hermitian_part();
    Triple::new(a, s0, theta1, theta2)
}

/// Scalar KdV data with real `Q = q`: `A = q²`, `θ1θ2*` real so that the
/// identity reduces to `0 = 0`, and `S(0) > 0`.
pub fn random_real_root_scalar(rng: &mut impl Rng) -> Result<(Triple, ComplexMatrix)> {
    let q = rng.random_range(0.5..1.2);
    let s0 = rng.random_range(0.5..2.0);
    let t1 = rng.random_range(-1.0..1.0);
    let t2 = rng.random_range(0.3..1.0);
    let m = |v: f64| ComplexMatrix::diag(&[C64::new(v, 0.0)]);
    Ok((Triple::new(m(q * q), m(s0), m(t1), m(t2))?, m(q)))
}

/// Acceptance rule for corpus members on a sampling domain.
///
/// Since `∂S/∂x = Λ2Λ2* ⪰ 0`, `S` is nondecreasing in `x`: if it is
/// positive definite at the left end (or negative definite at the right end)
/// of the `x` range, it is invertible on the whole range. This is checked at
/// every sampled `t`, together with `rcond(S) ≥ min_rcond` at every sample.
#[derive(Debug, Clone, Copy)]
pub struct Conditioning {
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub samples: usize,
    pub min_rcond: f64,
    /// Required `|λ|_min / ‖S‖_F` of the definite endpoint.
    pub definite_margin: f64,
}

impl Default for Conditioning {
    fn default() -> Self {
        Conditioning {
            x_range: (0.0, 3.0),
            t_range: (0.0, 0.0),
            samples: 41,
            min_rcond: 1e-6,
            definite_margin: 1e-3,
        }
    }
}

fn linspace((lo, hi): (f64, f64), samples: usize) -> Vec<f64> {
    if samples < 2 || lo == hi {
        return vec![lo];
    }
    (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Extreme eigenvalues `(min, max)` of a Hermitian matrix.
fn hermitian_extremes(s: &ComplexMatrix) -> Option<(f64, f64)> {
    let ev = eigenvalues(s).ok()?;
    let re = ev.iter().map(|z| z.re);
    Some((re.clone().fold(f64::INFINITY, f64::min), re.fold(f64::NEG_INFINITY, f64::max)))
}

fn well_conditioned<F>(s: F, cond: &Conditioning) -> bool
where
    F: Fn(f64, f64) -> Result<ComplexMatrix>,
{
    let definite = |t: f64| -> Option<bool> {
        let lo = s(cond.x_range.0, t).ok()?;
        let hi = s(cond.x_range.1, t).ok()?;
        let (lo_min, _) = hermitian_extremes(&lo)?;
        let (_, hi_max) = hermitian_extremes(&hi)?;
        Some(
            lo_min >= cond.definite_margin * lo.norm_fro() || hi_max <= -cond.definite_margin * hi.norm_fro(),
        )
    };
    linspace(cond.t_range, cond.samples / 2 + 2).into_iter().all(|t| {
        definite(t).unwrap_or(false)
            && linspace(cond.x_range, cond.samples)
                .into_iter()
                .all(|x| s(x, t).map(|m| rcond(&m) >= cond.min_rcond).unwrap_or(false))
    })
}

/// Smallest `λ_min(S) / ‖S‖_F` accepted for the new origin when re-basing.
const REBASE_MARGIN: f64 = 1e-4;

/// The triple `{A, S(x0)/σ, Π(x0)/√σ}`, `σ = ‖S(x0)‖_F`, at the point `x0`
/// of a scan of `[−8, 8]` where `λ_min(S)/‖S‖_F` is largest. The scaling
/// leaves the identity and the potential unchanged.
pub fn rebase_positive(c: &Construction) -> Option<Triple> {
    let (x0, _) = (-32..=32)
        .map(|k| 0.25 * k as f64)
        .filter_map(|x| {
            let s = c.s_matrix(x).ok()?;
            let (lo, _) = hermitian_extremes(&s)?;
            Some((x, lo / s.norm_fro()))
        })
        .filter(|&(_, ratio)| ratio >= REBASE_MARGIN)
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    let s = c.s_matrix(x0).ok()?.hermitian_part();
    let sigma = s.norm_fro();
    let (l1, l2) = c.dressing().lambda_pair(x0);
    let root = 1.0 / sigma.sqrt();
    Triple::new(
        c.triple().a().clone(),
        s.scale_real(1.0 / sigma),
        l1.scale_real(root),
        l2.scale_real(root),
    )
    .ok()
}

fn positive_triple(rng: &mut impl Rng, n: usize, h: usize, tol: &Tolerances) -> Result<Option<Triple>> {
    let raw = Construction::new(Dressing::new(random_triple(rng, n, h)?, None, tol)?, tol);
    Ok(rebase_positive(&raw))
}

/// `count` stationary constructions with `n ≤ n_max`, `h ≤ h_max`; shapes
/// cycle so that every `(n, h)` pair appears.
pub fn stationary_corpus(
    seed: u64,
    count: usize,
    n_max: usize,
    h_max: usize,
    cond: &Conditioning,
    tol: &Tolerances,
) -> Result<Vec<Construction>> {
    let mut rng = rng(seed);
    let shapes: Vec<(usize, usize)> = (1..=n_max).flat_map(|n| (1..=h_max).map(move |h| (n, h))).collect();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (n, h) = shapes[k % shapes.len()];
        out.push(draw(MAX_ATTEMPTS, || {
            let Some(triple) = positive_triple(&mut rng, n, h, tol)? else {
                return Ok(None);
            };
            let c = Construction::new(Dressing::new(triple, None, tol)?, tol);
            Ok(well_conditioned(|x, _| c.s_matrix(x), cond).then_some(c))
        })?);
    }
    Ok(out)
}

/// `count` KdV constructions with `n ≤ 3`: the first is the scalar real-root
/// case (integrated along a path), then shapes cycle through
/// `(1,1), (2,2), (3,1), (2,1), (3,2)`, so `h = 2` appears often.
pub fn kdv_corpus(seed: u64, count: usize, cond: &Conditioning, tol: &Tolerances) -> Result<Vec<KdvConstruction>> {
    let mut rng = rng(seed);
    let shapes = [(1, 1), (2, 2), (3, 1), (2, 1), (3, 2)];
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let real_root = k == 0;
        let (n, h) = shapes[(k + 4) % shapes.len()];
        out.push(draw(MAX_ATTEMPTS, || {
            let dressing = if real_root {
                let (triple, q) = random_real_root_scalar(&mut rng)?;
                Dressing::new(triple, Some(q), tol)?
            } else {
                let Some(triple) = positive_triple(&mut rng, n, h, tol)? else {
                    return Ok(None);
                };
                Dressing::new(triple, None, tol)?
            };
            let c = KdvConstruction::new(KdvDressing::new(dressing, tol)?, tol);
            Ok(well_conditioned(|x, t| c.s_matrix(x, t), cond).then_some(c))
        })?);
    }
    Ok(out)
}

fn draw<T>(attempts: usize, mut f: impl FnMut() -> Result<Option<T>>) -> Result<T> {
    for _ in 0..attempts {
        // retry on rejection and on numerical trouble alike
        if let Ok(Some(v)) = f() {
            return Ok(v);
        }
    }
    Err(GbdtError::InvalidParameter(format!(
        "no acceptable corpus member after {attempts} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{validate_triple, SMode};

    #[test]
    fn triples_are_valid() {
        let mut r = rng(7);
        let tol = Tolerances::default();
        for n in 1..=4 {
            for h in 1..=2 {
                let t = random_triple(&mut r, n, h).unwrap();
                assert!(validate_triple(&t, &tol).passed, "n={n} h={h}");
            }
        }
    }

    #[test]
    fn deterministic_and_closed_form() {
        let tol = Tolerances::default();
        let cond = Conditioning::default();
        let a = stationary_corpus(3, 4, 2, 2, &cond, &tol).unwrap();
        let b = stationary_corpus(3, 4, 2, 2, &cond, &tol).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.triple(), y.triple());
            assert_eq!(x.mode(), SMode::ClosedForm);
        }
    }
}
