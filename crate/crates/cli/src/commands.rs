use std::path::Path;

use gbdt::catalog::{ee36_fundamentals, ExamplePreset, PresetId};
use gbdt::matfun::{eigenvalues, resolvent_with};
use gbdt::verify::{
    dynamic_residual, identity_sweep, kdv_identity_sweep, kdv_residual, schrodinger_residual, Grid2,
    IdentitySweep, ResidualReport, DYNAMIC_TOLERANCE, KDV_TOLERANCE, SCHRODINGER_TOLERANCE,
};
use gbdt::{
    validate_triple, ComplexMatrix, GbdtError, KdvConstruction, KdvDressing, SMatrixEngine,
    SolutionRequest, C64, ONE, ZERO,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{Setup, Source};
use crate::error::CliError;
use crate::output::{self, complex_cells, matrix_cells, matrix_columns, num, vector_columns, Table};

fn fmt_c(z: C64) -> String {
    format!("{:e}{:+e}i", z.re, z.im)
}

fn fmt_matrix(m: &ComplexMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(|z| fmt_c(*z)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn header(setup: &Setup, command: &str, n: usize, h: usize, mode: impl std::fmt::Display) -> Vec<String> {
    vec![
        format!("gbdt {command} n={n} h={h} mode={mode}"),
        setup.describe(),
    ]
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn summary(name: &str, r: &ResidualReport) -> String {
    format!(
        "{} {name}: max residual {:e} at x={}{}, worst ratio {:e}, evaluated {}, skipped {}",
        if r.passed() { "PASS" } else { "FAIL" },
        r.max_residual,
        r.location.x,
        r.location.t.map(|t| format!(" t={t}")).unwrap_or_default(),
        r.worst_ratio,
        r.evaluated,
        r.skipped.len()
    )
}

/// Prints residual summaries to stderr, writes the sidecar report when an
/// output path exists, and turns failures into a breach.
fn finish_reports(setup: &Setup, reports: &[(String, ResidualReport)]) -> Result<(), CliError> {
    for (name, r) in reports {
        eprintln!("{}", summary(name, r));
    }
    if let Some(out) = &setup.out {
        let body: Vec<_> = reports.iter().map(|(name, r)| json!({"check": name, "passed": r.passed(), "report": r})).collect();
        write_json(&output::report_path(out), &json!(body))?;
    }
    let failed: Vec<&str> = reports.iter().filter(|(_, r)| !r.passed()).map(|(n, _)| n.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Breach(failed.join(", ")))
    }
}

pub fn check(setup: &Setup) -> Result<(), CliError> {
    let triple = setup.triple();
    let tol = &setup.tol;
    let report = validate_triple(&triple, tol);
    let spectrum = eigenvalues(triple.a())?;
    let mut lines = vec![
        format!("n = {}, h = {}", triple.n(), triple.h()),
        format!(
            "identity residual  {:e} (scale {:e}, tolerance {:e})",
            report.identity_residual, report.identity_scale, tol.identity_tol
        ),
        format!("hermitian residual {:e}", report.hermitian_residual),
        format!("spec(A): {}", spectrum.iter().map(|z| fmt_c(*z)).collect::<Vec<_>>().join(", ")),
    ];
    let mut doc = json!({
        "n": triple.n(),
        "h": triple.h(),
        "identity": report,
        "spectrum": spectrum.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    });
    let dressing = setup.dressing();
    match &dressing {
        Ok(d) => {
            let q = d.q();
            let root_residual = (&(q * q) - triple.a()).norm_fro();
            let mode = SMatrixEngine::build(d, tol).mode();
            lines.push(format!("Q: {} (root residual {root_residual:e})", fmt_matrix(q)));
            lines.push(format!("initial-value residual {:e}", d.initial_value_residual()));
            lines.push(format!("S mode: {mode}"));
            doc["root_residual"] = json!(root_residual);
            doc["initial_value_residual"] = json!(d.initial_value_residual());
            doc["mode"] = json!(mode);
        }
        Err(e) => {
            lines.push(format!("dressing failed: {e}"));
            doc["dressing_error"] = json!(e.to_string());
        }
    }
    lines.push(if report.passed { "PASS".into() } else { "FAIL".into() });
    doc["passed"] = json!(report.passed);
    println!("{}", lines.join("\n"));
    if let Some(out) = &setup.out {
        write_json(out, &doc)?;
    }
    if !report.passed {
        return Err(CliError::Breach("parameter identity".into()));
    }
    dressing.map(|_| ()).map_err(CliError::from)
}

pub fn potential(setup: &Setup) -> Result<(), CliError> {
    let c = setup.construction()?;
    let (n, h) = (c.triple().n(), c.triple().h());
    let mut columns = vec!["x".to_string()];
    columns.extend(matrix_columns("u", h, h));
    let mut table = Table::new(&header(setup, "potential", n, h, c.mode()), &columns);
    for x in setup.grid.points() {
        match c.potential(x) {
            Ok(u) => {
                let mut cells = vec![num(x)];
                cells.extend(matrix_cells(&u));
                table.row(&cells);
            }
            Err(e) if e.is_singular_point() => table.singular_row(&[num(x)]),
            Err(e) => return Err(e.into()),
        }
    }
    output::emit(setup.out.as_deref(), table.as_str())?;
    if setup.verify {
        let sweep = identity_sweep(&c, &setup.grid)?;
        return finish_sweeps(setup, &[("identity".into(), sweep)]);
    }
    Ok(())
}

fn sweep_passes(setup: &Setup, s: &IdentitySweep) -> bool {
    s.max_relative <= 10.0 * setup.tol.identity_tol
}

fn finish_sweeps(setup: &Setup, sweeps: &[(String, IdentitySweep)]) -> Result<(), CliError> {
    let mut failed = Vec::new();
    for (name, s) in sweeps {
        let ok = sweep_passes(setup, s);
        eprintln!(
            "{} {name}: max residual {:e}, max relative {:e} over {} samples",
            if ok { "PASS" } else { "FAIL" },
            s.max_residual,
            s.max_relative,
            s.samples
        );
        if !ok {
            failed.push(name.clone());
        }
    }
    if let Some(out) = &setup.out {
        let body: Vec<_> = sweeps.iter().map(|(n, s)| json!({"check": n, "passed": sweep_passes(setup, s), "sweep": s})).collect();
        write_json(&output::report_path(out), &json!(body))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Breach(failed.join(", ")))
    }
}

fn default_f0(setup: &Setup, m: usize) -> Result<Vec<C64>, CliError> {
    match &setup.f0 {
        Some(f0) if f0.len() != m => Err(CliError::Config(format!("f0 has length {}, expected 2h = {m}", f0.len()))),
        Some(f0) => Ok(f0.clone()),
        None => Ok((0..m).map(|i| if i == 0 { ONE } else { ZERO }).collect()),
    }
}

fn warn_near_spectrum(a: &ComplexMatrix, lambda: C64) {
    if let Ok(spec) = eigenvalues(a) {
        let distance = spec.iter().map(|mu| (mu - lambda).norm()).fold(f64::INFINITY, f64::min);
        if distance < 1e-6 * a.norm_fro().max(1.0) {
            log::warn!("lambda = {} lies within {distance:e} of spec(A)", fmt_c(lambda));
        }
    }
}

pub fn solve(setup: &Setup) -> Result<(), CliError> {
    let c = setup.construction()?;
    let (n, h) = (c.triple().n(), c.triple().h());
    let f0 = default_f0(setup, 2 * h)?;
    let mut columns = vec!["lambda.re".to_string(), "lambda.im".to_string(), "x".to_string()];
    columns.extend(vector_columns("y", h));
    let mut table = Table::new(&header(setup, "solve", n, h, c.mode()), &columns);
    let mut reports = Vec::new();
    let mut spectral: Option<GbdtError> = None;
    for &lambda in &setup.lambdas {
        warn_near_spectrum(c.triple().a(), lambda);
        if let Err(e) = resolvent_with(c.triple().a(), lambda, &setup.tol) {
            eprintln!("lambda = {}: {e}; continuing", fmt_c(lambda));
            table.comment(&format!("lambda={} skipped: {e}", fmt_c(lambda)));
            spectral.get_or_insert(e);
            continue;
        }
        let req = SolutionRequest::new(lambda, f0.clone());
        for x in setup.grid.points() {
            let keys = vec![num(lambda.re), num(lambda.im), num(x)];
            match c.transformed_solution(x, &req) {
                Ok(y) => {
                    let mut cells = keys;
                    cells.extend(complex_cells(y));
                    table.row(&cells);
                }
                Err(e) if e.is_singular_point() => table.singular_row(&keys),
                Err(e) => return Err(e.into()),
            }
        }
        if setup.verify {
            let r = schrodinger_residual(
                |x| c.potential(x),
                |x| c.transformed_solution(x, &req),
                lambda,
                &setup.grid,
                setup.scaled(SCHRODINGER_TOLERANCE),
            )?;
            reports.push((format!("schrodinger lambda={}", fmt_c(lambda)), r));
        }
    }
    output::emit(setup.out.as_deref(), table.as_str())?;
    if setup.verify {
        finish_reports(setup, &reports)?;
    }
    match spectral {
        Some(e) => Err(CliError::Numeric(e)),
        None => Ok(()),
    }
}

fn plane(setup: &Setup) -> Grid2 {
    Grid2 {
        x: setup.grid,
        t: setup.tgrid,
    }
}

pub fn dynamic(setup: &Setup) -> Result<(), CliError> {
    let c = setup.construction()?;
    let (n, h) = (c.triple().n(), c.triple().h());
    let mut columns = vec!["t".to_string(), "x".to_string()];
    columns.extend(matrix_columns("psi", h, n));
    let mut table = Table::new(&header(setup, "dynamic", n, h, c.mode()), &columns);
    for t in setup.tgrid.points() {
        for x in setup.grid.points() {
            match c.dynamic_solution(x, t) {
                Ok(psi) => {
                    let mut cells = vec![num(t), num(x)];
                    cells.extend(matrix_cells(&psi));
                    table.row(&cells);
                }
                Err(e) if e.is_singular_point() => table.singular_row(&[num(t), num(x)]),
                Err(e) => return Err(e.into()),
            }
        }
    }
    output::emit(setup.out.as_deref(), table.as_str())?;
    if setup.verify {
        let r = dynamic_residual(
            |x| c.potential(x),
            |x, t| c.dynamic_solution(x, t),
            &plane(setup),
            setup.scaled(DYNAMIC_TOLERANCE),
        )?;
        finish_reports(setup, &[("dynamic".into(), r)])?;
    }
    Ok(())
}

fn kdv_construction(setup: &Setup) -> Result<KdvConstruction, CliError> {
    let dressing = KdvDressing::new(setup.dressing()?, &setup.tol)?;
    Ok(KdvConstruction::new(dressing, &setup.tol))
}

pub fn kdv(setup: &Setup) -> Result<(), CliError> {
    let k = kdv_construction(setup)?;
    let t = k.dressing().triple();
    let (n, h) = (t.n(), t.h());
    let field = k.sample(&plane(setup))?;
    let mut columns = vec!["t".to_string(), "x".to_string()];
    columns.extend(matrix_columns("u", h, h));
    let mut table = Table::new(&header(setup, "kdv", n, h, k.mode()), &columns);
    for (it, &tv) in field.ts.iter().enumerate() {
        for (ix, &xv) in field.xs.iter().enumerate() {
            match field.get(ix, it) {
                Some(u) => {
                    let mut cells = vec![num(tv), num(xv)];
                    cells.extend(matrix_cells(u));
                    table.row(&cells);
                }
                None => table.singular_row(&[num(tv), num(xv)]),
            }
        }
    }
    output::emit(setup.out.as_deref(), table.as_str())?;
    if setup.verify {
        let r = kdv_residual(|x, t| k.potential(x, t), &plane(setup), setup.scaled(KDV_TOLERANCE))?;
        finish_reports(setup, &[("kdv".into(), r)])?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CheckOutcome {
    name: String,
    /// `pass`, `fail` or `error`.
    status: &'static str,
    detail: String,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    data: serde_json::Value,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: String, data: serde_json::Value) -> Self {
        CheckOutcome {
            name: name.into(),
            status: if passed { "pass" } else { "fail" },
            detail,
            data,
        }
    }

    fn error(name: impl Into<String>, e: &dyn std::fmt::Display) -> Self {
        CheckOutcome {
            name: name.into(),
            status: "error",
            detail: e.to_string(),
            data: serde_json::Value::Null,
        }
    }

    fn residual(name: impl Into<String>, r: gbdt::Result<ResidualReport>) -> Self {
        let name = name.into();
        match r {
            Ok(r) => {
                let line = summary(&name, &r);
                let detail = line.split_once(": ").map(|(_, d)| d.to_string()).unwrap_or(line);
                CheckOutcome::new(name, r.passed(), detail, json!(r))
            }
            Err(e) => CheckOutcome::error(name, &e),
        }
    }

    fn sweep(setup: &Setup, name: impl Into<String>, s: gbdt::Result<IdentitySweep>) -> Self {
        match s {
            Ok(s) => CheckOutcome::new(
                name,
                sweep_passes(setup, &s),
                format!("max relative {:e} over {} samples (limit {:e})", s.max_relative, s.samples, 10.0 * setup.tol.identity_tol),
                json!(s),
            ),
            Err(e) => CheckOutcome::error(name, &e),
        }
    }
}

/// Runs every applicable check on the configured triple.
pub fn verify(setup: &Setup) -> Result<(), CliError> {
    let triple = setup.triple();
    let report = validate_triple(&triple, &setup.tol);
    let mut checks = vec![CheckOutcome::new(
        "identity at x = 0",
        report.passed,
        format!("residual {:e}, hermitian residual {:e}", report.identity_residual, report.hermitian_residual),
        json!(report),
    )];
    match setup.construction() {
        Err(e) => checks.push(CheckOutcome::error("dressing", &e)),
        Ok(c) => {
            checks.push(CheckOutcome::sweep(setup, "identity along x", identity_sweep(&c, &setup.grid)));
            let f0 = default_f0(setup, 2 * triple.h())?;
            for &lambda in &setup.lambdas {
                let req = SolutionRequest::new(lambda, f0.clone());
                let r = schrodinger_residual(
                    |x| c.potential(x),
                    |x| c.transformed_solution(x, &req),
                    lambda,
                    &setup.grid,
                    setup.scaled(SCHRODINGER_TOLERANCE),
                );
                checks.push(CheckOutcome::residual(format!("schrodinger lambda={}", fmt_c(lambda)), r));
            }
            let r = dynamic_residual(
                |x| c.potential(x),
                |x, t| c.dynamic_solution(x, t),
                &plane(setup),
                setup.scaled(DYNAMIC_TOLERANCE),
            );
            checks.push(CheckOutcome::residual("dynamic", r));
        }
    }
    if report.passed {
        match kdv_construction(setup) {
            Err(e) => checks.push(CheckOutcome::error("kdv dressing", &e)),
            Ok(k) => {
                checks.push(CheckOutcome::sweep(setup, "identity over (x, t)", kdv_identity_sweep(&k, &plane(setup))));
                let r = kdv_residual(|x, t| k.potential(x, t), &plane(setup), setup.scaled(KDV_TOLERANCE));
                checks.push(CheckOutcome::residual("kdv", r));
            }
        }
    }

    let t = &triple;
    println!("gbdt verify n={} h={} grid={} tgrid={}", t.n(), t.h(), setup.grid, setup.tgrid);
    println!("{}", setup.describe());
    for ch in &checks {
        println!("{:<5} {}: {}", ch.status.to_uppercase(), ch.name, ch.detail);
    }
    if let Some(out) = &setup.out {
        write_json(out, &json!({"grid": setup.grid, "tgrid": setup.tgrid, "checks": checks}))?;
    }
    if let Some(e) = checks.iter().find(|c| c.status == "error") {
        return Err(CliError::Numeric(GbdtError::InvalidParameter(format!("{}: {}", e.name, e.detail))));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| c.status == "fail").map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Breach(failed.join(", ")))
    }
}

/// Largest entrywise deviation allowed between pipeline and closed form,
/// relative to `max(1, |reference|)`.
pub const EXAMPLE_TOLERANCE: f64 = 1e-10;

/// Tabulates a preset through the generic pipeline beside its closed form.
pub fn example(setup: &Setup, id: PresetId) -> Result<(), CliError> {
    let Source::Preset(preset) = &setup.source else {
        return Err(CliError::Config("example needs a preset".into()));
    };
    debug_assert_eq!(preset.id(), id);
    let c = setup.construction()?;
    let (n, h) = (c.triple().n(), c.triple().h());
    let lambda = setup.lambdas[0];
    let fundamentals = matches!(preset, ExamplePreset::Ee36 { .. });
    let mut columns = vec!["x".to_string()];
    columns.extend(matrix_columns("u", h, h));
    columns.extend(matrix_columns("u_ref", h, h));
    if fundamentals {
        for name in ["phi", "phi_ref", "chi", "chi_ref"] {
            columns.push(format!("{name}.re"));
            columns.push(format!("{name}.im"));
        }
    }
    columns.push("deviation".into());
    let mut head = header(setup, &format!("example {id}"), n, h, c.mode());
    if fundamentals {
        head.push(format!("lambda={}", fmt_c(lambda)));
    }
    let mut table = Table::new(&head, &columns);
    let phi_req = SolutionRequest::new(lambda, vec![ONE, ZERO]);
    let chi_req = phi_req.with_f0(vec![ZERO, ONE]);
    let mut worst = 0.0f64;
    for x in setup.grid.points() {
        let row = (|| -> gbdt::Result<Vec<String>> {
            let u = c.potential(x)?;
            let u_ref = preset.potential_reference(x)?;
            let mut deviation = rel_dev(&u, &u_ref);
            let mut cells = vec![num(x)];
            cells.extend(matrix_cells(&u));
            cells.extend(matrix_cells(&u_ref));
            if fundamentals {
                let f = ee36_fundamentals(lambda, x)?;
                let phi = c.transformed_solution(x, &phi_req)?[0];
                let chi = c.transformed_solution(x, &chi_req)?[0];
                for (got, want) in [(phi, f.phi), (chi, f.chi)] {
                    deviation = deviation.max((got - want).norm() / want.norm().max(1.0));
                    cells.extend(complex_cells([got, want]));
                }
            }
            worst = worst.max(deviation);
            cells.push(num(deviation));
            Ok(cells)
        })();
        match row {
            Ok(cells) => table.row(&cells),
            Err(e) if e.is_singular_point() || matches!(e, GbdtError::InvalidParameter(_)) => {
                table.singular_row(&[num(x)])
            }
            Err(e) => return Err(e.into()),
        }
    }
    output::emit(setup.out.as_deref(), table.as_str())?;
    let ok = worst <= EXAMPLE_TOLERANCE;
    eprintln!(
        "{} example {id}: worst relative deviation {worst:e} (limit {EXAMPLE_TOLERANCE:e})",
        if ok { "PASS" } else { "FAIL" }
    );
    if ok {
        Ok(())
    } else {
        Err(CliError::Breach(format!("example {id} deviates by {worst:e}")))
    }
}

fn rel_dev(got: &ComplexMatrix, want: &ComplexMatrix) -> f64 {
    got.as_slice()
        .iter()
        .zip(want.as_slice())
        .map(|(g, w)| (g - w).norm() / w.norm().max(1.0))
        .fold(0.0, f64::max)
}

