//! Adaptive composite Gauss–Legendre quadrature for matrix-valued integrands.
//!
//! Each panel is integrated once whole and once as two halves; the
//! difference is the error estimate and the halved value is kept. Panels
//! that miss their share of the tolerance are split recursively.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{GbdtError, Result};
use crate::matrix::ComplexMatrix;

const ORDER: usize = 16;
const MAX_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureControls {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the oscillation rate of the integrand; sets the
    /// initial panel length to about `2 / frequency`.
    pub frequency: f64,
}

impl Default for QuadratureControls {
    fn default() -> Self {
        QuadratureControls {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            frequency: 1.0,
        }
    }
}

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

/// Nodes on [-1, 1] by Newton iteration on the Legendre polynomial.
fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=ORDER {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

fn gauss<F>(f: &F, a: f64, b: f64) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc: Option<ComplexMatrix> = None;
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        let term = f(mid + half * x)?.scale_real(w * half);
        match acc.as_mut() {
            Some(s) => *s += &term,
            None => acc = Some(term),
        }
    }
    Ok(acc.expect("rule has nodes"))
}

/// `∫_a^b f(s) ds`; `b < a` is allowed and flips the sign.
pub fn integrate<F>(f: F, a: f64, b: f64, controls: &QuadratureControls) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    let length = (b - a).abs();
    if length == 0.0 {
        return Ok(f(a)?.scale_real(0.0));
    }
    let panels = ((length * controls.frequency.max(1e-3)) / 2.0).ceil().clamp(1.0, 1e6) as usize;
    let step = (b - a) / panels as f64;
    let mut coarse = Vec::with_capacity(panels);
    for k in 0..panels {
        let lo = a + step * k as f64;
        let hi = if k + 1 == panels { b } else { a + step * (k + 1) as f64 };
        coarse.push((lo, hi, gauss(&f, lo, hi)?));
    }
    let magnitude: f64 = coarse.iter().map(|(_, _, v)| v.norm_fro()).sum();
    let budget = controls.abs_tol.max(controls.rel_tol * magnitude);
    let mut total: Option<ComplexMatrix> = None;
    for (lo, hi, whole) in coarse {
        let share = budget * (hi - lo).abs() / length;
        let v = refine(&f, lo, hi, whole, share, 0)?;
        match total.as_mut() {
            Some(t) => *t += &v,
            None => total = Some(v),
        }
    }
    Ok(total.expect("at least one panel"))
}

fn refine<F>(f: &F, a: f64, b: f64, whole: ComplexMatrix, share: f64, depth: u32) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    let mid = 0.5 * (a + b);
    let left = gauss(f, a, mid)?;
    let right = gauss(f, mid, b)?;
    let halves = &left + &right;
    let estimate = (&halves - &whole).norm_fro();
    if estimate <= share {
        return Ok(halves);
    }
    if depth >= MAX_DEPTH {
        return Err(GbdtError::QuadratureFailure { a, b, estimate });
    }
    let l = refine(f, a, mid, left, 0.5 * share, depth + 1)?;
    let r = refine(f, mid, b, right, 0.5 * share, depth + 1)?;
    Ok(&l + &r)
}
