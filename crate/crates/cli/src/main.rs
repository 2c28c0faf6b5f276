mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gbdt::catalog::PresetId;
use gbdt::verify::Grid1;
use gbdt::C64;

use config::{parse_complex, Overrides, Setup, Source};
use error::CliError;

/// Explicit solutions of matrix Schrödinger and KdV equations by GBDT
/// dressing, with finite-difference verification.
#[derive(Debug, Parser)]
#[command(name = "gbdt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the parameter identity, the root Q and the S-matrix mode.
    Check(Common),
    /// Tabulate the transformed potential over --grid.
    Potential(Common),
    /// Tabulate the transformed solution for each --lambda over --grid.
    Solve(Common),
    /// Tabulate the dynamical solution over --grid × --tgrid.
    Dynamic(Common),
    /// Tabulate the KdV potential over --grid × --tgrid.
    Kdv(Common),
    /// Run every residual and identity check; nonzero exit on a breach.
    Verify(Common),
    /// Compare a worked example with its closed form.
    Example {
        #[arg(value_parser = parse_preset)]
        id: PresetId,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, env = "GBDT_CONFIG")]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, env = "GBDT_OUT")]
    out: Option<PathBuf>,
    /// x grid as start:stop:step.
    #[arg(long, env = "GBDT_GRID", value_parser = parse_grid)]
    grid: Option<Grid1>,
    /// t grid as start:stop:step.
    #[arg(long, env = "GBDT_TGRID", value_parser = parse_grid)]
    tgrid: Option<Grid1>,
    /// Spectral parameters, e.g. 1.7,2+0.5i.
    #[arg(long, env = "GBDT_LAMBDA", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    lambda: Vec<C64>,
    /// Initial vector for solve, length 2h.
    #[arg(long, env = "GBDT_F0", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    f0: Vec<C64>,
    /// Attach a residual report.
    #[arg(long, env = "GBDT_VERIFY")]
    verify: bool,
    /// Relative tolerance of the parameter identity.
    #[arg(long, env = "GBDT_TOL_IDENTITY")]
    tol_identity: Option<f64>,
    /// Factor applied to every residual tolerance.
    #[arg(long, env = "GBDT_TOL_RESIDUAL")]
    tol_residual: Option<f64>,
    /// Reciprocal condition number of S below which a point is SINGULAR.
    #[arg(long, env = "GBDT_TOL_COND")]
    tol_cond: Option<f64>,
    /// Preset triple: ee2, ee3 or ee36.
    #[arg(long, env = "GBDT_PRESET", value_parser = parse_preset)]
    preset: Option<PresetId>,
    /// Preset scale b (ee3, ee36).
    #[arg(long, env = "GBDT_B", allow_hyphen_values = true)]
    b: Option<f64>,
    /// Preset shift c (ee3).
    #[arg(long, env = "GBDT_C", allow_hyphen_values = true)]
    c: Option<f64>,
    /// Preset entry d of S(0), nonzero.
    #[arg(long, env = "GBDT_D", allow_hyphen_values = true)]
    d: Option<f64>,
}

fn parse_grid(s: &str) -> Result<Grid1, String> {
    s.parse().map_err(|e: gbdt::GbdtError| e.to_string())
}

fn parse_preset(s: &str) -> Result<PresetId, String> {
    s.parse().map_err(|e: gbdt::GbdtError| e.to_string())
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            config: self.config.clone(),
            out: self.out.clone(),
            grid: self.grid,
            tgrid: self.tgrid,
            lambda: self.lambda.clone(),
            f0: self.f0.clone(),
            verify: self.verify,
            tol_identity: self.tol_identity,
            tol_residual: self.tol_residual,
            tol_cond: self.tol_cond,
            preset: self.preset,
            b: self.b,
            c: self.c,
            d: self.d,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check(c) => commands::check(&Setup::resolve(&c.overrides())?),
        Command::Potential(c) => commands::potential(&Setup::resolve(&c.overrides())?),
        Command::Solve(c) => commands::solve(&Setup::resolve(&c.overrides())?),
        Command::Dynamic(c) => commands::dynamic(&Setup::resolve(&c.overrides())?),
        Command::Kdv(c) => commands::kdv(&Setup::resolve(&c.overrides())?),
        Command::Verify(c) => commands::verify(&Setup::resolve(&c.overrides())?),
        Command::Example { id, common } => {
            let mut flags = common.overrides();
            flags.preset = Some(id);
            let setup = Setup::resolve(&flags)?;
            debug_assert!(matches!(setup.source, Source::Preset(_)));
            commands::example(&setup, id)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gbdt: {e}");
            e.exit_code()
        }
    }
}
