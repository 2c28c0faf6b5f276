//! One-sided (Hestenes) Jacobi SVD. Accurate small singular values, which is
//! what the rank and conditioning tests rely on.

use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// `A = U·diag(sigma)·V*`, thin: `U` is m×k, `V` is n×k, `k = min(m, n)`.
/// Singular values are sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// `sigma_min / sigma_max`, 0 for the zero matrix.
    pub fn rcond(&self) -> f64 {
        let smax = self.sigma_max();
        if smax == 0.0 {
            0.0
        } else {
            self.sigma_min() / smax
        }
    }

    /// Minimum-norm least-squares solution of `A·X = B`, discarding singular
    /// values below `rel_tol·sigma_max`.
    pub fn pinv_solve(&self, b: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
        let cutoff = rel_tol * self.sigma_max();
        let mut coeffs = &self.u.adjoint() * b;
        for (i, &s) in self.sigma.iter().enumerate() {
            let inv = if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 };
            for j in 0..coeffs.cols() {
                coeffs[(i, j)] *= inv;
            }
        }
        &self.v * &coeffs
    }
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = jacobi_tall(&a.adjoint());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }
    jacobi_tall(a)
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    svd(a).sigma
}

fn jacobi_tall(a: &ComplexMatrix) -> Svd {
    let (m, n) = a.shape();
    let mut g = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let col_dot = |g: &ComplexMatrix, p: usize, q: usize| -> C64 {
        (0..m).map(|i| g[(i, p)].conj() * g[(i, q)]).sum()
    };
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = col_dot(&g, p, p).re;
                let beta = col_dot(&g, q, q).re;
                let gamma = col_dot(&g, p, q);
                let gabs = gamma.norm();
                if gabs == 0.0 || gabs <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / gabs;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // rotate column p against phase-aligned column q
                for mat in [&mut g, &mut v] {
                    for i in 0..mat.rows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase.conj();
                        mat[(i, p)] = xp * c - xq * s;
                        mat[(i, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(usize, f64)> = (0..n)
        .map(|j| (j, col_dot(&g, j, j).re.sqrt()))
        .collect();
    order.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = ComplexMatrix::zeros(m, n);
    let mut vs = ComplexMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &(j, s)) in order.iter().enumerate() {
        sigma.push(s);
        for i in 0..m {
            u[(i, k)] = if s > 0.0 { g[(i, j)] / s } else { ZERO };
        }
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
    }
    // zero columns get an arbitrary unit vector; only the span of nonzero ones matters
    for (k, &s) in sigma.iter().enumerate() {
        if s == 0.0 && k < m {
            u[(k, k)] = ONE;
        }
    }
    Svd { u, sigma, v: vs }
}
