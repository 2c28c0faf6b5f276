//! Worked examples with known closed forms, used as golden tests and as
//! CLI presets.
//!
//! * `ee2`: `A = Q = 0`, `θ1 = 0`, arbitrary Hermitian `S(0)` and `θ2`.
//! * `ee3`: `n = 2`, `h = 1`, nilpotent `Q`, real parameters `b, c, d`.
//! * `ee36`: `ee3` with `c = 0`, whose potential is `6/x²`, together with its
//!   fundamental solutions.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{GbdtError, Result};
use crate::matfun::principal_sqrt;
use crate::matrix::{ComplexMatrix, C64, I, ONE, ZERO};
use crate::tolerances::Tolerances;
use crate::transform::{Construction, Dressing, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetId {
    Ee2,
    Ee3,
    Ee36,
}

impl PresetId {
    pub const ALL: [PresetId; 3] = [PresetId::Ee2, PresetId::Ee3, PresetId::Ee36];

    pub fn as_str(&self) -> &'static str {
        match self {
            PresetId::Ee2 => "ee2",
            PresetId::Ee3 => "ee3",
            PresetId::Ee36 => "ee36",
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetId {
    type Err = GbdtError;

    fn from_str(s: &str) -> Result<Self> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| GbdtError::InvalidParameter(format!("unknown preset {s:?}; expected ee2, ee3 or ee36")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExamplePreset {
    Ee2 { s0: ComplexMatrix, theta2: ComplexMatrix },
    Ee3 { b: f64, c: f64, d: f64 },
    Ee36 { b: f64, d: f64 },
}

impl ExamplePreset {
    pub fn ee2(s0: ComplexMatrix, theta2: ComplexMatrix) -> Result<Self> {
        s0.require_square("S(0)")?;
        theta2.require_shape(s0.rows(), theta2.cols(), "theta2")?;
        Ok(ExamplePreset::Ee2 { s0, theta2 })
    }

    pub fn ee3(b: f64, c: f64, d: f64) -> Result<Self> {
        check_real_params(b, c, d)?;
        Ok(ExamplePreset::Ee3 { b, c, d })
    }

    pub fn ee36(b: f64, d: f64) -> Result<Self> {
        check_real_params(b, 0.0, d)?;
        if b == 0.0 {
            return Err(GbdtError::InvalidParameter("ee36 needs b != 0".into()));
        }
        Ok(ExamplePreset::Ee36 { b, d })
    }

    /// Scalar `ee2` with `S(0) = θ2 = 1`, `ee3`/`ee36` with `b = d = 1`, `c = 0`.
    pub fn default_for(id: PresetId) -> Self {
        match id {
            PresetId::Ee2 => ExamplePreset::Ee2 {
                s0: ComplexMatrix::identity(1),
                theta2: ComplexMatrix::identity(1),
            },
            PresetId::Ee3 => ExamplePreset::Ee3 { b: 1.0, c: 0.0, d: 1.0 },
            PresetId::Ee36 => ExamplePreset::Ee36 { b: 1.0, d: 1.0 },
        }
    }

    pub fn id(&self) -> PresetId {
        match self {
            ExamplePreset::Ee2 { .. } => PresetId::Ee2,
            ExamplePreset::Ee3 { .. } => PresetId::Ee3,
            ExamplePreset::Ee36 { .. } => PresetId::Ee36,
        }
    }

    fn bcd(&self) -> Option<(f64, f64, f64)> {
        match *self {
            ExamplePreset::Ee2 { .. } => None,
            ExamplePreset::Ee3 { b, c, d } => Some((b, c, d)),
            ExamplePreset::Ee36 { b, d } => Some((b, 0.0, d)),
        }
    }

    pub fn triple(&self) -> Triple {
        match self {
            ExamplePreset::Ee2 { s0, theta2 } => {
                let n = s0.rows();
                Triple::new(
                    ComplexMatrix::zeros(n, n),
                    s0.clone(),
                    ComplexMatrix::zeros(n, theta2.cols()),
                    theta2.clone(),
                )
            }
            _ => {
                let (b, c, d) = self.bcd().unwrap();
                Triple::new(
                    ComplexMatrix::zeros(2, 2),
                    ComplexMatrix::from_real(&[&[0.0, 0.0], &[0.0, d]]),
                    ComplexMatrix::from_real(&[&[b], &[0.0]]),
                    ComplexMatrix::from_real(&[&[c], &[0.0]]),
                )
            }
        }
        .expect("preset shapes are consistent")
    }

    /// The root `Q`: zero for `ee2`, `[[0, 1], [0, 0]]` otherwise.
    pub fn q(&self) -> ComplexMatrix {
        match self {
            ExamplePreset::Ee2 { s0, .. } => ComplexMatrix::zeros(s0.rows(), s0.rows()),
            _ => ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]),
        }
    }

    /// The fixed admissible amplitudes: `f1 = f2 = θ2/2` for `ee2`;
    /// `f11 = f21 = c/2`, `f12 = −f22 = ib/2` otherwise.
    pub fn amplitudes(&self) -> (ComplexMatrix, ComplexMatrix) {
        match self {
            ExamplePreset::Ee2 { theta2, .. } => {
                let half = theta2.scale_real(0.5);
                (half.clone(), half)
            }
            _ => {
                let (b, c, _) = self.bcd().unwrap();
                let f1 = ComplexMatrix::column_vector(&[C64::new(c / 2.0, 0.0), I * (b / 2.0)]);
                let f2 = ComplexMatrix::column_vector(&[C64::new(c / 2.0, 0.0), -I * (b / 2.0)]);
                (f1, f2)
            }
        }
    }

    pub fn dressing(&self, tol: &Tolerances) -> Result<Dressing> {
        let (f1, f2) = self.amplitudes();
        Dressing::from_parts(self.triple(), self.q(), f1, f2, tol)
    }

    pub fn construction(&self, tol: &Tolerances) -> Result<Construction> {
        Ok(Construction::new(self.dressing(tol)?, tol))
    }

    /// Closed-form `ũ(x)` for this preset.
    pub fn potential_reference(&self, x: f64) -> Result<ComplexMatrix> {
        match self {
            ExamplePreset::Ee2 { s0, theta2 } => ee2_potential_reference(s0, theta2, x),
            _ => {
                let (b, c, d) = self.bcd().unwrap();
                let u = ee3_potential_reference(b, c, d, x)?;
                Ok(ComplexMatrix::diag(&[C64::new(u, 0.0)]))
            }
        }
    }
}

fn check_real_params(b: f64, c: f64, d: f64) -> Result<()> {
    if !(b.is_finite() && c.is_finite() && d.is_finite()) {
        return Err(GbdtError::InvalidParameter("b, c, d must be finite".into()));
    }
    if d == 0.0 {
        return Err(GbdtError::InvalidParameter("d must be nonzero".into()));
    }
    Ok(())
}

/// `ũ(x) = 2(θ2*(S0 + xθ2θ2*)⁻¹θ2)²`.
pub fn ee2_potential_reference(s0: &ComplexMatrix, theta2: &ComplexMatrix, x: f64) -> Result<ComplexMatrix> {
    let s = s0 + &(theta2 * &theta2.adjoint()).scale_real(x);
    let inner = &theta2.adjoint() * &s.solve(theta2)?;
    Ok((&inner * &inner).scale_real(2.0))
}

/// The `h×h` form `ũ(x) = 2((I_h + xθ2*S0⁻¹θ2)⁻¹θ2*S0⁻¹θ2)²`; needs `S0`
/// invertible.
pub fn ee2_potential_simplified(s0: &ComplexMatrix, theta2: &ComplexMatrix, x: f64) -> Result<ComplexMatrix> {
    let small = &theta2.adjoint() * &s0.solve(theta2)?;
    let shifted = small.scale_real(x).add_identity(ONE);
    let inner = shifted.solve(&small)?;
    Ok((&inner * &inner).scale_real(2.0))
}

/// `γ(x) = (b²/3)x³ − bcx² + c²x`, the varying entry of `S(x)` in `ee3`.
pub fn ee3_gamma(b: f64, c: f64, x: f64) -> f64 {
    (b * b / 3.0) * x * x * x - b * c * x * x + c * c * x
}

/// `ũ(x) = 2(bx − c)((b³/3)x³ − b²cx² + bc²x − c³) / γ(x)²`.
pub fn ee3_potential_reference(b: f64, c: f64, d: f64, x: f64) -> Result<f64> {
    check_real_params(b, c, d)?;
    let gamma = ee3_gamma(b, c, x);
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(GbdtError::SingularGamma { x });
    }
    let cubic = (b * b * b / 3.0) * x * x * x - b * b * c * x * x + b * c * c * x - c * c * c;
    Ok(2.0 * (b * x - c) * cubic / (gamma * gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fundamental {
    /// `e^{ix√λ}(1 + 3i/(√λx) − 3/(λx²))`
    Phi,
    /// `e^{−ix√λ}(1 − 3i/(√λx) − 3/(λx²))`
    Chi,
    /// `φ − χ`, bounded as `x → 0`.
    Regular,
}

/// `φ`, `χ` and `φ − χ` of the `6/x²` potential at one point, all built
/// from the single principal `√λ` that is also returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalValues {
    pub sqrt_lambda: C64,
    pub phi: C64,
    pub chi: C64,
    pub regular: C64,
}

pub fn ee36_fundamentals(lambda: C64, x: f64) -> Result<FundamentalValues> {
    if x == 0.0 || lambda == ZERO {
        return Err(GbdtError::InvalidParameter("fundamental solutions need x != 0 and lambda != 0".into()));
    }
    let k = principal_sqrt(lambda);
    let tail = |k: C64| (I * k * x).exp() * (ONE + 3.0 * I / (k * x) - 3.0 / (lambda * x * x));
    let phi = tail(k);
    let chi = tail(-k);
    Ok(FundamentalValues {
        sqrt_lambda: k,
        phi,
        chi,
        regular: phi - chi,
    })
}

pub fn ee36_fundamental(lambda: C64, x: f64, which: Fundamental) -> Result<C64> {
    let v = ee36_fundamentals(lambda, x)?;
    Ok(match which {
        Fundamental::Phi => v.phi,
        Fundamental::Chi => v.chi,
        Fundamental::Regular => v.regular,
    })
}
