//! Complex Schur decomposition `A = U·T·U*` with `T` upper triangular.
//!
//! Householder reduction to Hessenberg form followed by single-shift QR
//! sweeps (Wilkinson shift, bulge chasing with complex Givens rotations).

use crate::error::{GbdtError, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone)]
pub struct Schur {
    pub unitary: ComplexMatrix,
    pub triangular: ComplexMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.triangular.diagonal()
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G·[x; y] = [r; 0]`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn annihilating(x: C64, y: C64) -> Givens {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Givens { c: 1.0, s: ZERO };
        }
        if ax == 0.0 {
            return Givens {
                c: 0.0,
                s: y.conj() / ay,
            };
        }
        let norm = ax.hypot(ay);
        let phase = x / ax;
        Givens {
            c: ax / norm,
            s: phase * y.conj() / norm,
        }
    }

    /// Rows `k`, `k+1` of `m`, columns `cols`: `m ← G·m`.
    fn apply_left(&self, m: &mut ComplexMatrix, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(k, j)];
            let b = m[(k + 1, j)];
            m[(k, j)] = a * self.c + self.s * b;
            m[(k + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `k`, `k+1` of `m`, rows `rows`: `m ← m·G*`.
    fn apply_right(&self, m: &mut ComplexMatrix, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let a = m[(i, k)];
            let b = m[(i, k + 1)];
            m[(i, k)] = a * self.c + b * self.s.conj();
            m[(i, k + 1)] = -a * self.s + b * self.c;
        }
    }
}

fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut u = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // H ← (I - 2vv*) H
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * dot * 2.0;
            }
        }
        // H ← H (I - 2vv*), U ← U (I - 2vv*)
        for m in [&mut h, &mut u] {
            for i in 0..n {
                let dot: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| m[(i, k + 1 + r)] * vr)
                    .sum();
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= dot * vr.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, u)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

pub fn schur(a: &ComplexMatrix) -> Result<Schur> {
    a.require_square("Schur input")?;
    let n = a.rows();
    let (mut t, mut u) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur {
            unitary: u,
            triangular: t,
        });
    }
    let norm = t.norm_fro();
    let max_iter = 100 * n.max(4);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = t[(l - 1, l - 1)].norm() + t[(l, l)].norm();
            if s == 0.0 {
                s = norm;
            }
            if t[(l, l - 1)].norm() <= f64::EPSILON * s {
                t[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(GbdtError::SchurNoConvergence { iterations: total });
        }
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            t[(hi, hi)] + C64::new(0.75, 0.5) * t[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };
        for k in l..hi {
            let g = if k == l {
                Givens::annihilating(t[(l, l)] - mu, t[(l + 1, l)])
            } else {
                Givens::annihilating(t[(k, k - 1)], t[(k + 1, k - 1)])
            };
            let first_col = if k == l { l } else { k - 1 };
            g.apply_left(&mut t, k, first_col..n);
            let last_row = (k + 2).min(hi);
            g.apply_right(&mut t, k, 0..last_row + 1);
            g.apply_right(&mut u, k, 0..n);
            if k > l {
                t[(k + 1, k - 1)] = ZERO;
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur {
        unitary: u,
        triangular: t,
    })
}
