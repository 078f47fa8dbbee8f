//! Command-line surface: dispersion tables, the two 1-D simulators, and the
//! verification suite.
//!
//! Exit codes: 0 success, 1 configuration error, 2 domain error (including
//! loss of positive definiteness), 3 simulation blow-up.

// Validation comparisons use `!(x > 0.0)` on purpose: NaN must fail too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::Vector3;

use capfluid::conjugate::{self, PhysicalState};
use capfluid::eulerian1d::{self, EulerianField};
use capfluid::lagrangian1d::{self, LagrangianField};
use capfluid::sim::{RunOptions, RunOutcome};
use capfluid::sweep::{self, SweepContext};
use capfluid::verify::{self, VerifySettings};
use capfluid::Error as CoreError;

use config::{InitialCondition, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "capfluid",
    about = "Dispersion analysis and 1-D simulation of capillary fluids in symmetric form",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Table format for `dispersion` (audits are always CSV, reports JSON).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Seed override for the randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Frequencies of the Hermitian pencil over a range of wave numbers.
    Dispersion,
    /// Nonlinear mass-Lagrangian run with energy/constraint audits.
    SimulateLagrangian,
    /// Nonlinear Eulerian run with energy/momentum/constraint audits.
    SimulateEulerian,
    /// Run the invariant suite and emit a machine-readable report.
    Verify,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_BLOWUP: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match load_config(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(path) = &cli.output {
        cfg.output.path = Some(path.display().to_string());
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }

    let result = match cli.command {
        Command::Dispersion => cmd_dispersion(&cfg),
        Command::SimulateLagrangian => cmd_simulate_lagrangian(&cfg),
        Command::SimulateEulerian => cmd_simulate_eulerian(&cfg),
        Command::Verify => cmd_verify(&cfg),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                AppError::Io(_) => EXIT_CONFIG,
                AppError::Domain(_) => EXIT_DOMAIN,
            })
        }
    }
}

enum AppError {
    Io(std::io::Error),
    Domain(CoreError),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Io(e) => write!(f, "{e}"),
            AppError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Domain(e)
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, String> {
    let cfg: RunConfig = match path {
        None => RunConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn verify_settings(cfg: &RunConfig) -> VerifySettings {
    VerifySettings {
        eos: cfg.eos,
        capillarity: cfg.c,
        rho_e: cfg.equilibrium.rho_e,
        eta_e: cfg.equilibrium.eta_e,
        u_e: Vector3::from(cfg.equilibrium.u_e),
        efun: cfg.lagrangian_energy,
        seed: cfg.seed,
        spectral_samples: cfg.verify.spectral_samples,
    }
}

fn out_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.output.path.as_ref().map(PathBuf::from)
}

fn cmd_dispersion(cfg: &RunConfig) -> Result<ExitCode, AppError> {
    let eq = &cfg.equilibrium;
    let state = PhysicalState {
        rho: eq.rho_e,
        eta: eq.eta_e,
        momentum: eq.rho_e * Vector3::from(eq.u_e),
        grad_rho: Vector3::zeros(),
        capillarity: cfg.c,
    };
    let v = conjugate::to_conjugate(&state, &cfg.eos)?;
    let ctx = SweepContext::new(&v, &cfg.eos, state.thermo())?;
    let d = &cfg.dispersion;
    let ks = sweep::linspace_ks(d.k_min, d.k_max, d.n_k, Vector3::from(d.direction));
    let rows = sweep::dispersion_sweep(&ctx, &ks)?;
    let path = out_path(cfg);
    let sink = output::open_sink(path.as_deref())?;
    match cfg.output.format {
        OutputFormat::Csv => output::write_dispersion_csv(sink, &rows)?,
        OutputFormat::Json => output::write_dispersion_json(sink, &rows)?,
    }
    Ok(ExitCode::SUCCESS)
}

/// Resolve dt from the config against a solver stability bound, warning and
/// clamping when the requested step exceeds it.
fn resolve_dt(cfg: &RunConfig, bound: f64) -> f64 {
    match (cfg.time.dt, cfg.time.cfl) {
        (Some(dt), None) => {
            if dt > bound {
                eprintln!(
                    "warning: requested dt {dt:.3e} exceeds the stability bound; using {bound:.3e}"
                );
                bound
            } else {
                dt
            }
        }
        (None, Some(cfl)) => cfl * bound,
        _ => unreachable!("validated"),
    }
}

fn run_options(cfg: &RunConfig, dt: f64) -> RunOptions {
    RunOptions {
        dt,
        t_final: cfg.time.t_final,
        audit_every: cfg.time.audit_every,
        snapshot_every: cfg.time.snapshot_every,
    }
}

fn cmd_simulate_lagrangian(cfg: &RunConfig) -> Result<ExitCode, AppError> {
    let efun = cfg.lagrangian_energy;
    let order = cfg.stencil_order();
    let v0 = 1.0 / cfg.equilibrium.rho_e;
    let mut field = match cfg.initial {
        InitialCondition::Uniform => {
            LagrangianField::uniform(cfg.grid.n, cfg.grid.length, v0, order)?
        }
        InitialCondition::StandingWave { amplitude, mode } => {
            LagrangianField::standing_wave(cfg.grid.n, cfg.grid.length, v0, amplitude, mode, order)?
        }
    };
    for u in field.u.iter_mut() {
        *u = cfg.equilibrium.u_e[0];
    }
    // The stability bound uses unit CFL; resolve_dt applies the user's cfl.
    let bound = lagrangian1d::stable_dt(&field, &efun, 1.0)?;
    let opts = run_options(cfg, resolve_dt(cfg, bound));
    let log = lagrangian1d::run(&mut field, &efun, &opts)?;

    let path = out_path(cfg);
    let sink = output::open_sink(path.as_deref())?;
    output::write_lagrangian_audits(sink, &log.audits)?;
    if !log.snapshots.is_empty() {
        let base = path.as_deref().ok_or_else(|| {
            AppError::Io(std::io::Error::other(
                "snapshots require output.path (stdout has no sibling files)",
            ))
        })?;
        for (i, snap) in log.snapshots.iter().enumerate() {
            let sink = output::open_sink(Some(&output::snapshot_path(base, i)))?;
            output::write_lagrangian_snapshot(sink, snap)?;
        }
    }
    if let RunOutcome::BlowUp { t_last_good } = log.outcome {
        eprintln!("simulation blew up; last good state at t = {t_last_good:.6e}");
        return Ok(ExitCode::from(EXIT_BLOWUP));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate_eulerian(cfg: &RunConfig) -> Result<ExitCode, AppError> {
    let order = cfg.stencil_order();
    let eq = &cfg.equilibrium;
    let mut field = match cfg.initial {
        InitialCondition::Uniform => EulerianField::uniform(
            cfg.grid.n,
            cfg.grid.length,
            eq.rho_e,
            eq.eta_e,
            eq.u_e[0],
            cfg.c,
            order,
        )?,
        InitialCondition::StandingWave { amplitude, mode } => EulerianField::standing_wave(
            cfg.grid.n,
            cfg.grid.length,
            eq.rho_e,
            eq.eta_e,
            eq.u_e[0],
            amplitude,
            mode,
            cfg.c,
            order,
        )?,
    };
    let bound = eulerian1d::stable_dt(&field, &cfg.eos, 1.0)?;
    let opts = run_options(cfg, resolve_dt(cfg, bound));
    let log = eulerian1d::run(&mut field, &cfg.eos, &opts)?;

    let path = out_path(cfg);
    let sink = output::open_sink(path.as_deref())?;
    output::write_eulerian_audits(sink, &log.audits)?;
    if !log.snapshots.is_empty() {
        let base = path.as_deref().ok_or_else(|| {
            AppError::Io(std::io::Error::other(
                "snapshots require output.path (stdout has no sibling files)",
            ))
        })?;
        for (i, snap) in log.snapshots.iter().enumerate() {
            let sink = output::open_sink(Some(&output::snapshot_path(base, i)))?;
            output::write_eulerian_snapshot(sink, snap)?;
        }
    }
    if let RunOutcome::BlowUp { t_last_good } = log.outcome {
        eprintln!("simulation blew up; last good state at t = {t_last_good:.6e}");
        return Ok(ExitCode::from(EXIT_BLOWUP));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cfg: &RunConfig) -> Result<ExitCode, AppError> {
    let settings = verify_settings(cfg);
    let report = verify::run_suite(&settings);
    let path = out_path(cfg);
    let mut sink = output::open_sink(path.as_deref())?;
    use std::io::Write;
    sink.write_all(report.to_json().as_bytes())?;
    sink.flush()?;
    // Check failures are report entries, not process errors.
    Ok(ExitCode::SUCCESS)
}
