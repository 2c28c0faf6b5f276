//! Finite-difference residuals of the stationary, dynamical and KdV
//! equations.
//!
//! Samplers are evaluated once per grid point (in parallel); residuals are
//! formed at interior points from central stencils on the grid itself, so
//! the grid step is the difference step. A point whose stencil touches a
//! singular point of `S` is skipped and listed, never interpolated.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GbdtError, Result};
use crate::matrix::{ComplexMatrix, C64, I};
use crate::verify::grid::{Grid1, Grid2, GridSpec};

/// Pass threshold `max(floor, constant · step^order · scale)`, where `scale`
/// is the summed magnitude of the terms of the equation at that point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualTolerance {
    pub floor: f64,
    pub constant: f64,
    pub order: i32,
}

impl ResidualTolerance {
    pub fn threshold(&self, step: f64, scale: f64) -> f64 {
        self.floor.max(self.constant * step.powi(self.order) * scale)
    }
}

/// 4th-order `y''` stencil; constant checked against `λ²/180` on the free
/// equation, where the truncation term is `h⁴λ³/90` against a scale of `2|λ|`.
pub const SCHRODINGER_TOLERANCE: ResidualTolerance = ResidualTolerance {
    floor: 1e-6,
    constant: 1.0,
    order: 4,
};

/// Central `ψ_t`; the truncation term `k²‖ψA³‖/6` over a scale of at least
/// `‖ψA‖` gives `‖A‖²/6`.
pub const DYNAMIC_TOLERANCE: ResidualTolerance = ResidualTolerance {
    floor: 1e-6,
    constant: 1.0,
    order: 2,
};

/// 5-point `ũ_xxx` (truncation `h²ũ⁽⁵⁾/4`) and central `ũ_t`.
pub const KDV_TOLERANCE: ResidualTolerance = ResidualTolerance {
    floor: 1e-5,
    constant: 10.0,
    order: 2,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub at: Point,
    pub diagnosis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub grid: GridSpec,
    pub tolerance: ResidualTolerance,
    pub max_residual: f64,
    pub location: Point,
    /// Local scale at `location`.
    pub scale: f64,
    /// Largest residual-to-threshold ratio; the report passes when ≤ 1.
    pub worst_ratio: f64,
    pub worst_location: Point,
    pub evaluated: usize,
    pub skipped: Vec<SkippedPoint>,
    /// KdV only: largest `‖ũ·ũ_x − ũ_x·ũ‖`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_commutator: Option<f64>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.evaluated > 0 && self.worst_ratio <= 1.0
    }
}

struct Accumulator {
    tolerance: ResidualTolerance,
    step: f64,
    max_residual: f64,
    location: Point,
    scale: f64,
    worst_ratio: f64,
    worst_location: Point,
    evaluated: usize,
    skipped: Vec<SkippedPoint>,
}

impl Accumulator {
    fn new(tolerance: ResidualTolerance, step: f64, origin: Point) -> Self {
        Accumulator {
            tolerance,
            step,
            max_residual: 0.0,
            location: origin,
            scale: 0.0,
            worst_ratio: 0.0,
            worst_location: origin,
            evaluated: 0,
            skipped: Vec::new(),
        }
    }

    fn record(&mut self, at: Point, residual: f64, scale: f64) {
        self.evaluated += 1;
        let ratio = residual / self.tolerance.threshold(self.step, scale);
        // NaN residuals must fail
        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
        if residual > self.max_residual || residual.is_nan() {
            self.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
            self.location = at;
            self.scale = scale;
        }
        if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
            self.worst_location = at;
        }
    }

    fn skip(&mut self, at: Point, err: &GbdtError) {
        self.skipped.push(SkippedPoint {
            at,
            diagnosis: err.to_string(),
        });
    }

    fn finish(self, grid: GridSpec, max_commutator: Option<f64>) -> ResidualReport {
        ResidualReport {
            grid,
            tolerance: self.tolerance,
            max_residual: self.max_residual,
            location: self.location,
            scale: self.scale,
            worst_ratio: self.worst_ratio,
            worst_location: self.worst_location,
            evaluated: self.evaluated,
            skipped: self.skipped,
            max_commutator,
        }
    }
}

fn sample_line<T, F>(points: &[f64], f: F) -> Result<Vec<std::result::Result<T, GbdtError>>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    let samples: Vec<Result<T>> = points.par_iter().map(|&x| f(x)).collect();
    // non-singular failures abort the whole report
    for s in &samples {
        if let Err(e) = s {
            if !e.is_singular_point() {
                return Err(e.clone());
            }
        }
    }
    Ok(samples)
}

fn first_singular<'a, T>(samples: impl IntoIterator<Item = &'a Result<T>>) -> Option<&'a GbdtError>
where
    T: 'a,
{
    samples.into_iter().find_map(|s| s.as_ref().err())
}

/// `(−y₋₂ + 16y₋₁ − 30y₀ + 16y₁ − y₂) / 12h²`
fn second_derivative(s: [&ComplexMatrix; 5], h: f64) -> ComplexMatrix {
    let mut acc = s[1] + s[3];
    acc = acc.scale_real(16.0);
    acc -= &s[0].clone();
    acc -= &s[4].clone();
    acc -= &s[2].scale_real(30.0);
    acc.scale_real(1.0 / (12.0 * h * h))
}

/// `(y₋₂ − 8y₋₁ + 8y₁ − y₂) / 12h`
fn first_derivative(s: [&ComplexMatrix; 5], h: f64) -> ComplexMatrix {
    let mut acc = (s[3] - s[1]).scale_real(8.0);
    acc += &(s[0] - s[4]);
    acc.scale_real(1.0 / (12.0 * h))
}

/// `(−y₋₂ + 2y₋₁ − 2y₁ + y₂) / 2h³`
fn third_derivative(s: [&ComplexMatrix; 5], h: f64) -> ComplexMatrix {
    let mut acc = (s[1] - s[3]).scale_real(2.0);
    acc += &(s[4] - s[0]);
    acc.scale_real(1.0 / (2.0 * h * h * h))
}

/// Largest `‖·‖_F` among the nonsingular samples.
fn sup_norm(samples: &[Result<ComplexMatrix>]) -> f64 {
    samples
        .iter()
        .filter_map(|s| s.as_ref().ok())
        .map(ComplexMatrix::norm_fro)
        .fold(0.0, f64::max)
}

fn need_points(n: usize, min: usize, axis: &str) -> Result<()> {
    if n < min {
        return Err(GbdtError::GridTooCoarse(format!(
            "{axis} axis has {n} points, stencil needs at least {min}"
        )));
    }
    Ok(())
}

/// Max over the grid of `‖−ỹ'' + ũỹ − λỹ‖`.
pub fn schrodinger_residual<U, Y>(
    potential: U,
    solution: Y,
    lambda: C64,
    grid: &Grid1,
    tolerance: ResidualTolerance,
) -> Result<ResidualReport>
where
    U: Fn(f64) -> Result<ComplexMatrix> + Sync,
    Y: Fn(f64) -> Result<Vec<C64>> + Sync,
{
    let xs = grid.points();
    need_points(xs.len(), 5, "x")?;
    let h = grid.step;
    let us = sample_line(&xs, &potential)?;
    let ys = sample_line(&xs, |x| solution(x).map(|v| ComplexMatrix::column_vector(&v)))?;
    // the stencil error is h⁴·y⁽⁶⁾/90 and y⁽⁶⁾ ~ ω⁶y with ω² = |λ| + sup‖ũ‖
    let omega2 = lambda.norm() + sup_norm(&us);
    let mut acc = Accumulator::new(tolerance, h, Point { x: xs[2], t: None });
    for i in 2..xs.len() - 2 {
        let at = Point { x: xs[i], t: None };
        if let Some(e) = first_singular(ys[i - 2..=i + 2].iter().chain(std::iter::once(&us[i]))) {
            acc.skip(at, e);
            continue;
        }
        let y: Vec<&ComplexMatrix> = ys[i - 2..=i + 2].iter().map(|s| s.as_ref().unwrap()).collect();
        let u = us[i].as_ref().unwrap();
        let ypp = second_derivative([y[0], y[1], y[2], y[3], y[4]], h);
        let uy = u * y[2];
        let ly = y[2].scale(lambda);
        let residual = (&(&uy - &ypp) - &ly).norm_fro();
        let scale = (ypp.norm_fro() + uy.norm_fro() + ly.norm_fro()) * omega2 * omega2;
        acc.record(at, residual, scale);
    }
    Ok(acc.finish(GridSpec::Line(*grid), None))
}

/// Max over the grid of `‖iψ̃_t + ψ̃_xx − ũψ̃‖_F`.
pub fn dynamic_residual<U, P>(
    potential: U,
    psi: P,
    grid: &Grid2,
    tolerance: ResidualTolerance,
) -> Result<ResidualReport>
where
    U: Fn(f64) -> Result<ComplexMatrix> + Sync,
    P: Fn(f64, f64) -> Result<ComplexMatrix> + Sync,
{
    let xs = grid.x.points();
    let ts = grid.t.points();
    need_points(xs.len(), 5, "x")?;
    need_points(ts.len(), 3, "t")?;
    let (hx, ht) = (grid.x.step, grid.t.step);
    let us = sample_line(&xs, &potential)?;
    let nx = xs.len();
    let pts: Vec<(f64, f64)> = ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect();
    let psis: Vec<Result<ComplexMatrix>> = pts.par_iter().map(|&(x, t)| psi(x, t)).collect();
    if let Some(e) = psis.iter().filter_map(|s| s.as_ref().err()).find(|e| !e.is_singular_point()) {
        return Err(e.clone());
    }
    let at_idx = |i: usize, k: usize| &psis[k * nx + i];
    let mut acc = Accumulator::new(
        tolerance,
        ht.max(hx),
        Point {
            x: xs[2],
            t: Some(ts[1]),
        },
    );
    for k in 1..ts.len() - 1 {
        for i in 2..nx - 2 {
            let at = Point { x: xs[i], t: Some(ts[k]) };
            let stencil = (i - 2..=i + 2)
                .map(|j| at_idx(j, k))
                .chain([at_idx(i, k - 1), at_idx(i, k + 1)])
                .chain(std::iter::once(&us[i]));
            if let Some(e) = first_singular(stencil) {
                acc.skip(at, e);
                continue;
            }
            let row: Vec<&ComplexMatrix> = (i - 2..=i + 2).map(|j| at_idx(j, k).as_ref().unwrap()).collect();
            let before = at_idx(i, k - 1).as_ref().unwrap();
            let after = at_idx(i, k + 1).as_ref().unwrap();
            let u = us[i].as_ref().unwrap();
            let psi_t = (after - before).scale_real(1.0 / (2.0 * ht));
            let i_psi_t = psi_t.scale(I);
            let psi_xx = second_derivative([row[0], row[1], row[2], row[3], row[4]], hx);
            let u_psi = u * row[2];
            let residual = (&(&i_psi_t + &psi_xx) - &u_psi).norm_fro();
            let scale = i_psi_t.norm_fro() + psi_xx.norm_fro() + u_psi.norm_fro();
            acc.record(at, residual, scale);
        }
    }
    Ok(acc.finish(GridSpec::Plane(*grid), None))
}

/// Max over the grid of `‖ũ_t − 3ũũ_x − 3ũ_xũ + ũ_xxx‖_F`, products in
/// that order.
pub fn kdv_residual<U>(potential: U, grid: &Grid2, tolerance: ResidualTolerance) -> Result<ResidualReport>
where
    U: Fn(f64, f64) -> Result<ComplexMatrix> + Sync,
{
    let xs = grid.x.points();
    let ts = grid.t.points();
    need_points(xs.len(), 5, "x")?;
    need_points(ts.len(), 3, "t")?;
    let (hx, ht) = (grid.x.step, grid.t.step);
    let nx = xs.len();
    let pts: Vec<(f64, f64)> = ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect();
    let us: Vec<Result<ComplexMatrix>> = pts.par_iter().map(|&(x, t)| potential(x, t)).collect();
    if let Some(e) = us.iter().filter_map(|s| s.as_ref().err()).find(|e| !e.is_singular_point()) {
        return Err(e.clone());
    }
    let at_idx = |i: usize, k: usize| &us[k * nx + i];
    let mut acc = Accumulator::new(
        tolerance,
        hx.max(ht),
        Point {
            x: xs[2],
            t: Some(ts[1]),
        },
    );
    struct Sample {
        at: Point,
        residual: f64,
        terms: f64,
        u: f64,
        u_x: f64,
        u_t: f64,
    }
    let mut samples = Vec::new();
    let mut max_commutator: f64 = 0.0;
    for k in 1..ts.len() - 1 {
        for i in 2..nx - 2 {
            let at = Point { x: xs[i], t: Some(ts[k]) };
            let stencil = (i - 2..=i + 2)
                .map(|j| at_idx(j, k))
                .chain([at_idx(i, k - 1), at_idx(i, k + 1)]);
            if let Some(e) = first_singular(stencil) {
                acc.skip(at, e);
                continue;
            }
            let row: Vec<&ComplexMatrix> = (i - 2..=i + 2).map(|j| at_idx(j, k).as_ref().unwrap()).collect();
            let row = [row[0], row[1], row[2], row[3], row[4]];
            let u = row[2];
            let u_t = (at_idx(i, k + 1).as_ref().unwrap() - at_idx(i, k - 1).as_ref().unwrap())
                .scale_real(1.0 / (2.0 * ht));
            let u_x = first_derivative(row, hx);
            let u_xxx = third_derivative(row, hx);
            let left = (u * &u_x).scale_real(3.0);
            let right = (&u_x * u).scale_real(3.0);
            max_commutator = max_commutator.max((&left - &right).norm_fro() / 3.0);
            samples.push(Sample {
                at,
                residual: (&(&(&u_t - &left) - &right) + &u_xxx).norm_fro(),
                terms: u_t.norm_fro() + left.norm_fro() + right.norm_fro() + u_xxx.norm_fro(),
                u: u.norm_fro(),
                u_x: u_x.norm_fro(),
                u_t: u_t.norm_fro(),
            });
        }
    }
    // Frequencies estimated from the data: ω_x = sup‖ũ_x‖/sup‖ũ‖ and
    // ω_t = sup‖ũ_t‖/sup‖ũ‖. The stencil errors are ~ h_x²ω_x² and
    // h_t²ω_t² relative to the terms.
    let sup = |f: fn(&Sample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let u_sup = sup(|s| s.u);
    let (omega_x, omega_t) = if u_sup > 0.0 {
        (sup(|s| s.u_x) / u_sup, sup(|s| s.u_t) / u_sup)
    } else {
        (0.0, 0.0)
    };
    let step = hx.max(ht);
    let weight = ((hx * omega_x).powi(2) + (ht * omega_t).powi(2)) / (step * step);
    for s in &samples {
        acc.record(s.at, s.residual, s.terms * weight);
    }
    Ok(acc.finish(GridSpec::Plane(*grid), Some(max_commutator)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(z: C64) -> ComplexMatrix {
        ComplexMatrix::diag(&[z])
    }

    #[test]
    fn free_equation_fourth_order() {
        let lambda = C64::new(4.0, 0.0);
        let k = lambda.sqrt();
        let run = |h: f64| {
            schrodinger_residual(
                |_| Ok(scalar(C64::new(0.0, 0.0))),
                |x| Ok(vec![(I * k * x).exp()]),
                lambda,
                &Grid1::new(0.0, 2.0, h).unwrap(),
                SCHRODINGER_TOLERANCE,
            )
            .unwrap()
        };
        let coarse = run(0.05);
        let fine = run(0.025);
        assert!(coarse.passed() && fine.passed());
        // truncation h⁴ λ³ / 90
        let predicted = 0.05f64.powi(4) * 64.0 / 90.0;
        assert!((coarse.max_residual / predicted - 1.0).abs() < 0.05, "{}", coarse.max_residual);
        let ratio = coarse.max_residual / fine.max_residual;
        assert!(ratio > 15.0 && ratio < 17.0, "ratio {ratio}");
        // calibration: the constant leaves room over the free-equation value λ²/180
        assert!(coarse.max_residual / (0.05f64.powi(4) * coarse.scale) < SCHRODINGER_TOLERANCE.constant);
    }

    #[test]
    fn wrong_potential_is_caught() {
        let lambda = C64::new(1.0, 0.0);
        let r = schrodinger_residual(
            |_| Ok(scalar(C64::new(0.5, 0.0))),
            |x| Ok(vec![(I * x).exp()]),
            lambda,
            &Grid1::new(0.0, 1.0, 0.01).unwrap(),
            SCHRODINGER_TOLERANCE,
        )
        .unwrap();
        assert!(!r.passed());
        assert!((r.max_residual - 0.5).abs() < 1e-6);
    }

    #[test]
    fn singular_points_are_skipped() {
        let r = schrodinger_residual(
            |x| {
                if (x - 0.5).abs() < 1e-9 {
                    Err(GbdtError::SingularS { x, t: 0.0, rcond: 0.0 })
                } else {
                    Ok(scalar(C64::new(0.0, 0.0)))
                }
            },
            |x| {
                if (x - 0.5).abs() < 1e-9 {
                    Err(GbdtError::SingularS { x, t: 0.0, rcond: 0.0 })
                } else {
                    Ok(vec![(I * x).exp()])
                }
            },
            C64::new(1.0, 0.0),
            &Grid1::new(0.0, 1.0, 0.1).unwrap(),
            SCHRODINGER_TOLERANCE,
        )
        .unwrap();
        // 0.3, 0.4, 0.5, 0.6, 0.7 all touch x = 0.5
        assert_eq!(r.skipped.len(), 5);
        assert_eq!(r.evaluated, 2);
        assert!(r.passed());
    }

    #[test]
    fn too_coarse_grid() {
        let e = schrodinger_residual(
            |_| Ok(scalar(C64::new(0.0, 0.0))),
            |_| Ok(vec![C64::new(1.0, 0.0)]),
            C64::new(1.0, 0.0),
            &Grid1::new(0.0, 0.3, 0.1).unwrap(),
            SCHRODINGER_TOLERANCE,
        );
        assert!(matches!(e, Err(GbdtError::GridTooCoarse(_))));
    }

    #[test]
    fn free_dynamic_plane_wave() {
        // ψ = e^{i(kx − k²t)} solves iψ_t + ψ_xx = 0
        let k = 1.3;
        let grid = Grid2 {
            x: Grid1::new(0.0, 1.0, 0.01).unwrap(),
            t: Grid1::new(0.0, 0.2, 0.001).unwrap(),
        };
        let r = dynamic_residual(
            |_| Ok(scalar(C64::new(0.0, 0.0))),
            |x, t| Ok(scalar((I * (k * x - k * k * t)).exp())),
            &grid,
            DYNAMIC_TOLERANCE,
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.max_residual < 1e-6);
    }

    #[test]
    fn one_soliton_kdv() {
        // u = −2κ² sech²(κ(x − 4κ²t)) solves u_t − 6uu_x + u_xxx = 0
        let kappa = 0.8;
        let u = |x: f64, t: f64| {
            let s = 1.0 / (kappa * (x - 4.0 * kappa * kappa * t)).cosh();
            Ok(scalar(C64::new(-2.0 * kappa * kappa * s * s, 0.0)))
        };
        let grid = Grid2 {
            x: Grid1::new(-2.0, 2.0, 0.005).unwrap(),
            t: Grid1::new(0.0, 0.05, 0.001).unwrap(),
        };
        let r = kdv_residual(u, &grid, KDV_TOLERANCE).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.max_commutator, Some(0.0));
        // doubling the amplitude breaks the equation
        let bad = kdv_residual(
            |x, t| u(x, t).map(|m| m.scale_real(2.0)),
            &grid,
            KDV_TOLERANCE,
        )
        .unwrap();
        assert!(!bad.passed());
    }
}
