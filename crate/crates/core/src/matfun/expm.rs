//! Matrix exponential: scaling and squaring with the degree-13 Padé
//! approximant, plus an exact truncated series for nilpotent arguments.

use crate::matrix::{ComplexMatrix, C64};

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `exp(M)` for a square `M`. Panics if `M` is not square.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "expm needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    if n == 1 {
        return ComplexMatrix::diag(&[m[(0, 0)].exp()]);
    }
    if let Some(e) = nilpotent_series(m) {
        return e;
    }
    let norm = m.norm_one();
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = m.scale_real(2f64.powi(-squarings));
    let mut r = pade13(&scaled);
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// `Σ_{k<p} M^k/k!` when `M^p` is exactly zero for some `p ≤ n`.
fn nilpotent_series(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    let mut power = m.clone();
    for k in 1..=n {
        if power.is_zero() {
            return Some(sum);
        }
        term = (&term * m).scale_real(1.0 / k as f64);
        sum += &term;
        if k < n {
            power = &power * m;
        }
    }
    None
}

fn pade13(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let b = |k: usize| C64::new(PADE_13[k], 0.0);
    let id = ComplexMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let lincomb = |c6: usize, c4: usize, c2: usize| -> ComplexMatrix {
        let mut s = a6.scale(b(c6));
        s += &a4.scale(b(c4));
        s += &a2.scale(b(c2));
        s
    };
    let mut u_inner = &a6 * &lincomb(13, 11, 9);
    u_inner += &lincomb(7, 5, 3);
    u_inner += &id.scale(b(1));
    let u = a * &u_inner;
    let mut v = &a6 * &lincomb(12, 10, 8);
    v += &lincomb(6, 4, 2);
    v += &id.scale(b(0));
    let num = &v + &u;
    let den = &v - &u;
    // the denominator is well conditioned for ‖a‖₁ ≤ θ₁₃
    den.solve(&num)
        .expect("Padé denominator is nonsingular after scaling")
}
