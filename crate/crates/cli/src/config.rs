//! Run configuration: a JSON document merged under command-line flags.
//!
//! Complex scalars are either plain numbers or `[re, im]` pairs; matrices
//! are arrays of rows. Flags (and their `GBDT_` environment variables) take
//! precedence over the document, which takes precedence over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use gbdt::catalog::{ExamplePreset, PresetId};
use gbdt::verify::{Grid1, ResidualTolerance};
use gbdt::{ComplexMatrix, Construction, Dressing, Tolerances, Triple, C64};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexInput> for C64 {
    fn from(v: ComplexInput) -> C64 {
        match v {
            ComplexInput::Real(re) => C64::new(re, 0.0),
            ComplexInput::Pair([re, im]) => C64::new(re, im),
        }
    }
}

pub type MatrixInput = Vec<Vec<ComplexInput>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridInput {
    Text(String),
    Parts { start: f64, stop: f64, step: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleInput {
    #[serde(rename = "A")]
    pub a: MatrixInput,
    #[serde(rename = "S0")]
    pub s0: MatrixInput,
    pub theta1: MatrixInput,
    pub theta2: MatrixInput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetInput {
    pub id: String,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub s0: Option<MatrixInput>,
    pub theta2: Option<MatrixInput>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceInput {
    pub identity: Option<f64>,
    pub residual: Option<f64>,
    pub cond: Option<f64>,
    pub root: Option<f64>,
    pub rank: Option<f64>,
    pub eigen: Option<f64>,
    pub sylvester_sep: Option<f64>,
    pub quad_abs: Option<f64>,
    pub quad_rel: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub triple: Option<TripleInput>,
    pub preset: Option<PresetInput>,
    #[serde(rename = "Q")]
    pub q: Option<MatrixInput>,
    pub grid: Option<GridInput>,
    pub tgrid: Option<GridInput>,
    pub lambda: Option<Vec<ComplexInput>>,
    pub f0: Option<Vec<ComplexInput>>,
    #[serde(default)]
    pub tolerances: ToleranceInput,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Errors name the offending field path and the line and column.
    pub fn parse(text: &str) -> Result<Self, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            format!("field `{path}`: {inner}")
        })
    }
}

/// Flags shared by every command, already merged with the environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub grid: Option<Grid1>,
    pub tgrid: Option<Grid1>,
    pub lambda: Vec<C64>,
    pub f0: Vec<C64>,
    pub verify: bool,
    pub tol_identity: Option<f64>,
    pub tol_residual: Option<f64>,
    pub tol_cond: Option<f64>,
    pub preset: Option<PresetId>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum Source {
    Preset(ExamplePreset),
    Triple { triple: Triple, q: Option<ComplexMatrix> },
}

/// Everything a command needs, with defaults filled in.
#[derive(Debug, Clone)]
pub struct Setup {
    pub source: Source,
    pub grid: Grid1,
    pub tgrid: Grid1,
    pub lambdas: Vec<C64>,
    pub f0: Option<Vec<C64>>,
    pub tol: Tolerances,
    /// Multiplies floor and constant of every residual tolerance.
    pub residual_factor: f64,
    pub out: Option<PathBuf>,
    pub verify: bool,
}

pub const DEFAULT_GRID: &str = "0:3:0.1";
pub const DEFAULT_TGRID: &str = "0:0.2:0.02";

impl Setup {
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let cfg = match &flags.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let source = resolve_source(flags, &cfg)?;
        let grid = pick_grid(flags.grid, cfg.grid.as_ref(), DEFAULT_GRID, "grid")?;
        let tgrid = pick_grid(flags.tgrid, cfg.tgrid.as_ref(), DEFAULT_TGRID, "tgrid")?;
        let lambdas = if !flags.lambda.is_empty() {
            flags.lambda.clone()
        } else {
            cfg.lambda
                .map(|v| v.into_iter().map(C64::from).collect())
                .unwrap_or_else(|| vec![C64::new(1.0, 0.0)])
        };
        let f0 = if !flags.f0.is_empty() {
            Some(flags.f0.clone())
        } else {
            cfg.f0.map(|v| v.into_iter().map(C64::from).collect())
        };

        let t = &cfg.tolerances;
        let mut tol = Tolerances::default();
        let set = |slot: &mut f64, value: Option<f64>| {
            if let Some(v) = value {
                *slot = v;
            }
        };
        set(&mut tol.identity_tol, flags.tol_identity.or(t.identity));
        set(&mut tol.cond_tol, flags.tol_cond.or(t.cond));
        set(&mut tol.root_tol, t.root);
        set(&mut tol.rank_tol, t.rank);
        set(&mut tol.eigen_tol, t.eigen);
        set(&mut tol.sylvester_sep_tol, t.sylvester_sep);
        set(&mut tol.quad_abs_tol, t.quad_abs);
        set(&mut tol.quad_rel_tol, t.quad_rel);
        let residual_factor = flags.tol_residual.or(t.residual).unwrap_or(1.0);
        let all = [
            tol.identity_tol,
            tol.cond_tol,
            tol.root_tol,
            tol.rank_tol,
            tol.eigen_tol,
            tol.sylvester_sep_tol,
            tol.quad_abs_tol,
            tol.quad_rel_tol,
            residual_factor,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CliError::Config("tolerances must be positive and finite".into()));
        }

        Ok(Setup {
            source,
            grid,
            tgrid,
            lambdas,
            f0,
            tol,
            residual_factor,
            out: flags.out.clone().or(cfg.out),
            verify: flags.verify,
        })
    }

    pub fn triple(&self) -> Triple {
        match &self.source {
            Source::Preset(p) => p.triple(),
            Source::Triple { triple, .. } => triple.clone(),
        }
    }

    /// Presets use their fixed amplitudes; general triples solve for them.
    pub fn dressing(&self) -> gbdt::Result<Dressing> {
        match &self.source {
            Source::Preset(p) => p.dressing(&self.tol),
            Source::Triple { triple, q } => Dressing::new(triple.clone(), q.clone(), &self.tol),
        }
    }

    pub fn construction(&self) -> gbdt::Result<Construction> {
        Ok(Construction::new(self.dressing()?, &self.tol))
    }

    pub fn scaled(&self, base: ResidualTolerance) -> ResidualTolerance {
        ResidualTolerance {
            floor: base.floor * self.residual_factor,
            constant: base.constant * self.residual_factor,
            order: base.order,
        }
    }

    /// `source=...` and the tolerance set, for CSV headers and reports.
    pub fn describe(&self) -> String {
        let source = match &self.source {
            Source::Preset(ExamplePreset::Ee2 { s0, theta2 }) => {
                format!("preset:ee2 n={} h={}", s0.rows(), theta2.cols())
            }
            Source::Preset(ExamplePreset::Ee3 { b, c, d }) => format!("preset:ee3 b={b} c={c} d={d}"),
            Source::Preset(ExamplePreset::Ee36 { b, d }) => format!("preset:ee36 b={b} d={d}"),
            Source::Triple { q: Some(_), .. } => "triple supplied_root".into(),
            Source::Triple { q: None, .. } => "triple".into(),
        };
        let t = &self.tol;
        format!(
            "source={source} identity_tol={:e} cond_tol={:e} root_tol={:e} sylvester_sep_tol={:e} quad_rel_tol={:e} quad_abs_tol={:e} residual_factor={:e}",
            t.identity_tol, t.cond_tol, t.root_tol, t.sylvester_sep_tol, t.quad_rel_tol, t.quad_abs_tol, self.residual_factor
        )
    }
}

fn pick_grid(flag: Option<Grid1>, cfg: Option<&GridInput>, default: &str, name: &str) -> Result<Grid1, CliError> {
    if let Some(g) = flag {
        return Ok(g);
    }
    let parsed = match cfg {
        Some(GridInput::Text(s)) => s.parse::<Grid1>(),
        Some(GridInput::Parts { start, stop, step }) => Grid1::new(*start, *stop, *step),
        None => default.parse::<Grid1>(),
    };
    parsed.map_err(|e| CliError::Config(format!("field `{name}`: {e}")))
}

pub fn matrix(rows: &MatrixInput, name: &str) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().copied().map(C64::from).collect()).collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Config(format!("field `{name}`: {e}")))
}

fn resolve_source(flags: &Overrides, cfg: &RunConfig) -> Result<Source, CliError> {
    let preset_input = cfg.preset.as_ref();
    let id = match (flags.preset, preset_input) {
        (Some(id), _) => Some(id),
        (None, Some(p)) => Some(
            p.id.parse::<PresetId>()
                .map_err(|e| CliError::Config(format!("field `preset.id`: {e}")))?,
        ),
        (None, None) => None,
    };
    let Some(id) = id else {
        let Some(t) = &cfg.triple else {
            return Err(CliError::Config(
                "no triple: give --preset or a config with `triple` or `preset`".into(),
            ));
        };
        let triple = Triple::new(
            matrix(&t.a, "triple.A")?,
            matrix(&t.s0, "triple.S0")?,
            matrix(&t.theta1, "triple.theta1")?,
            matrix(&t.theta2, "triple.theta2")?,
        )
        .map_err(|e| CliError::Config(format!("field `triple`: {e}")))?;
        let q = cfg.q.as_ref().map(|q| matrix(q, "Q")).transpose()?;
        return Ok(Source::Triple { triple, q });
    };
    if cfg.triple.is_some() && flags.preset.is_none() {
        return Err(CliError::Config("config gives both `triple` and `preset`".into()));
    }
    // parameters from the document only apply to the preset it names
    let from_cfg = preset_input.filter(|p| p.id == id.as_str());
    let param = |flag: Option<f64>, pick: fn(&PresetInput) -> Option<f64>| flag.or_else(|| from_cfg.and_then(pick));
    let default = ExamplePreset::default_for(id);
    let preset = match default {
        ExamplePreset::Ee2 { s0, theta2 } => {
            let s0 = match from_cfg.and_then(|p| p.s0.as_ref()) {
                Some(m) => matrix(m, "preset.s0")?,
                None => s0,
            };
            let theta2 = match from_cfg.and_then(|p| p.theta2.as_ref()) {
                Some(m) => matrix(m, "preset.theta2")?,
                None => theta2,
            };
            ExamplePreset::ee2(s0, theta2)
        }
        ExamplePreset::Ee3 { b, c, d } => ExamplePreset::ee3(
            param(flags.b, |p| p.b).unwrap_or(b),
            param(flags.c, |p| p.c).unwrap_or(c),
            param(flags.d, |p| p.d).unwrap_or(d),
        ),
        ExamplePreset::Ee36 { b, d } => {
            if param(flags.c, |p| p.c).is_some_and(|c| c != 0.0) {
                return Err(CliError::Config("ee36 has c = 0; use ee3 for c != 0".into()));
            }
            ExamplePreset::ee36(param(flags.b, |p| p.b).unwrap_or(b), param(flags.d, |p| p.d).unwrap_or(d))
        }
    }
    .map_err(|e| CliError::Config(format!("preset {id}: {e}")))?;
    Ok(Source::Preset(preset))
}

/// Parses `1.5`, `-2i`, `0.3+1.2i`, `1e-3-4e2i`.
pub fn parse_complex(text: &str) -> Result<C64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {text:?} as a complex number");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => t.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}
