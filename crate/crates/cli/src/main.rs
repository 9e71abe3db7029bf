//! `cq`: batch front end for the cubic-quintic ground-state solver and
//! its sweep harness. Subcommands mirror the library: closed-form TF data,
//! single ground-state solves, Townes-soliton shooting, the two sweep
//! families, and a report tool that re-checks sweep files against the
//! acceptance thresholds.
//!
//! Exit codes: 0 success, 2 validation/config error, 3 solver
//! non-convergence, 4 failed report check.

mod config;
mod output;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use cq_core::{
    energy_breakdown, eps_of_l, ground_state, pohozaev_residual, q_soliton, sweep_tf_limit,
    sweep_thermo, Error as CoreError, Grid, Init, RadialGrid, SolverOptions, SweepOptions,
    TfProfile,
};

use config::{merge, require, FileConfig};
use output::{emit, fmt_f64, plot_data, sweep_csv, sweep_json};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, input files, or output paths (exit 2).
    Validation(String),
    /// Solver failed to converge or diverged (exit 3).
    Solver(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NoConvergence(_) | CoreError::Diverged { .. } => {
                CliError::Solver(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "cq", version, about = "cubic-quintic ground states, Thomas-Fermi limits, and rate sweeps")]
struct Cli {
    /// Flat JSON config file mirroring the flags; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form Thomas-Fermi profile data for (dim, rho).
    Tf(TfArgs),
    /// Solve one ground state at the scale L and print its diagnostics.
    Solve(SolveArgs),
    /// Shoot the Townes-type soliton Q_d and print its identities.
    Soliton(SolitonArgs),
    /// Thermodynamic sweep over L on the fixed ball.
    SweepThermo(SweepThermoArgs),
    /// Whole-space Thomas-Fermi-limit sweep over N on a truncated grid.
    SweepTf(SweepTfArgs),
    /// Re-check sweep files against the acceptance thresholds.
    Report(ReportArgs),
}

#[derive(Args)]
struct TfArgs {
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tol_energy: Option<f64>,
    #[arg(long)]
    tol_residual: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Initial iterate: tf-plateau-smoothed | gaussian.
    #[arg(long)]
    init: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    rho: Option<f64>,
    /// Domain scale L (single value).
    #[arg(long = "L", value_name = "L")]
    l: Option<f64>,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the converged profile as two-column "r u" text.
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

#[derive(Args)]
struct SolitonArgs {
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepThermoArgs {
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    rho: Option<f64>,
    /// Comma-separated increasing list of L values.
    #[arg(long = "L", value_name = "LIST", value_delimiter = ',', num_args = 1..)]
    l: Option<Vec<f64>>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Interior margin for the L∞ column (rho < 3/4).
    #[arg(long)]
    margin: Option<f64>,
    /// Warm-start each solve from the previous L (sequential).
    #[arg(long)]
    warm_start: Option<bool>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepTfArgs {
    #[arg(long)]
    dim: Option<u32>,
    /// Comma-separated increasing list of N values.
    #[arg(long = "N", value_name = "LIST", value_delimiter = ',', num_args = 1..)]
    n_particles: Option<Vec<f64>>,
    /// Truncation radius of the whole-space grid (≥ 1.5·r₀).
    #[arg(long)]
    trunc: Option<f64>,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    warm_start: Option<bool>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Sweep CSV files produced by sweep-thermo / sweep-tf.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Write two-column plot data per fitted quantity into this directory.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file_cfg = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => return fail(e),
        },
        None => FileConfig::default(),
    };
    let outcome = match cli.cmd {
        Cmd::Tf(args) => run_tf(args, &file_cfg),
        Cmd::Solve(args) => run_solve(args, &file_cfg),
        Cmd::Soliton(args) => run_soliton(args, &file_cfg),
        Cmd::SweepThermo(args) => run_sweep_thermo(args, &file_cfg),
        Cmd::SweepTf(args) => run_sweep_tf(args, &file_cfg),
        Cmd::Report(args) => report::run_report(&args.files, args.plot_dir.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    match e {
        CliError::Validation(msg) => {
            eprintln!("cq: {msg}");
            ExitCode::from(2)
        }
        CliError::Solver(msg) => {
            eprintln!("cq: {msg}");
            ExitCode::from(3)
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

fn parse_format(s: Option<String>, default: Format) -> Result<Format, CliError> {
    match s.as_deref() {
        None => Ok(default),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(CliError::Validation(format!(
            "unknown format {other:?}; use csv or json"
        ))),
    }
}

fn check_rho(rho: f64) -> Result<f64, CliError> {
    if !(rho.is_finite() && rho > 0.0 && rho <= 0.75) {
        return Err(CliError::Validation(format!(
            "rho = {rho} outside the admissible range 0 < rho <= 3/4"
        )));
    }
    Ok(rho)
}

fn solver_options(flags: &SolverFlags, cfg: &FileConfig) -> Result<SolverOptions, CliError> {
    let mut opts = SolverOptions::default();
    if let Some(tau) = merge(flags.tau, cfg.tau) {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(CliError::Validation(format!("tau must be positive (got {tau})")));
        }
        opts.tau = tau;
    }
    if let Some(t) = merge(flags.tol_energy, cfg.tol_energy) {
        opts.tol_energy = t;
    }
    if let Some(t) = merge(flags.tol_residual, cfg.tol_residual) {
        opts.tol_residual = t;
    }
    if let Some(m) = merge(flags.max_iter, cfg.max_iter) {
        opts.max_iter = m;
    }
    match merge(flags.init.clone(), cfg.init.clone()).as_deref() {
        None | Some("tf-plateau-smoothed") => {}
        Some("gaussian") => opts.init = Init::Gaussian,
        Some(other) => {
            return Err(CliError::Validation(format!(
                "unknown init {other:?}; use tf-plateau-smoothed or gaussian"
            )))
        }
    }
    Ok(opts)
}

fn sweep_options(
    flags: &SolverFlags,
    margin: Option<f64>,
    warm_start: Option<bool>,
    cfg: &FileConfig,
) -> Result<SweepOptions, CliError> {
    let mut opts = SweepOptions {
        solver: solver_options(flags, cfg)?,
        ..Default::default()
    };
    if let Some(m) = merge(margin, cfg.margin) {
        if !(m.is_finite() && m >= 0.0) {
            return Err(CliError::Validation(format!("margin must be >= 0 (got {m})")));
        }
        opts.linf_margin = m;
    }
    if let Some(w) = merge(warm_start, cfg.warm_start) {
        opts.warm_start = w;
    }
    opts.threads = threads_from_env()?;
    Ok(opts)
}

/// CQ_THREADS caps the parallel-row path (warm_start = false).
fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var("CQ_THREADS") {
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Validation(format!(
                "CQ_THREADS must be an integer >= 1 (got {raw:?})"
            ))),
        },
    }
}

fn grid_cells(n: Option<usize>, cfg: &FileConfig, default: usize) -> usize {
    merge(n, cfg.n).unwrap_or(default)
}

fn json_line(pairs: &[(&str, serde_json::Value)]) -> String {
    let map: serde_json::Map<String, serde_json::Value> =
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(map))
        .expect("report serializes");
    text.push('\n');
    text
}

fn num(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn run_tf(args: TfArgs, cfg: &FileConfig) -> Result<u8, CliError> {
    let dim = require(merge(args.dim, cfg.dim), "dim")?;
    let rho = require(merge(args.rho, cfg.rho), "rho")?;
    let profile = TfProfile::new(dim, rho).map_err(CliError::from)?;
    let format = parse_format(merge(args.format, cfg.format.clone()), Format::Json)?;
    let text = match format {
        Format::Json => json_line(&[
            ("dim", serde_json::Value::from(profile.dim)),
            ("rho", num(profile.rho)),
            ("domain_radius", num(profile.domain_radius)),
            ("plateau_radius", num(profile.plateau_radius)),
            ("plateau_height", num(profile.plateau_height)),
            ("energy", num(profile.energy)),
            ("multiplier", num(profile.multiplier)),
        ]),
        Format::Csv => format!(
            "dim,rho,domain_radius,plateau_radius,plateau_height,energy,multiplier\n{},{},{},{},{},{},{}\n",
            profile.dim,
            fmt_f64(profile.rho),
            fmt_f64(profile.domain_radius),
            fmt_f64(profile.plateau_radius),
            fmt_f64(profile.plateau_height),
            fmt_f64(profile.energy),
            fmt_f64(profile.multiplier)
        ),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn run_solve(args: SolveArgs, cfg: &FileConfig) -> Result<u8, CliError> {
    let dim = require(merge(args.dim, cfg.dim), "dim")?;
    let rho = check_rho(require(merge(args.rho, cfg.rho), "rho")?)?;
    let l = require(
        merge(args.l, cfg.l_list.as_ref().and_then(|v| v.first().copied())),
        "L",
    )?;
    if !(l.is_finite() && l > 0.0) {
        return Err(CliError::Validation(format!("L must be positive (got {l})")));
    }
    let opts = solver_options(&args.solver, cfg)?;
    let profile = TfProfile::new(dim, rho).map_err(CliError::from)?;
    let n = grid_cells(args.solver.n, cfg, 4096);
    let grid: Grid =
        Arc::new(RadialGrid::new(dim, profile.domain_radius, n).map_err(CliError::from)?);
    let eps = eps_of_l(dim, rho, 1.0, l);
    let state = ground_state(&grid, eps, &opts).map_err(CliError::from)?;
    let e = energy_breakdown(&state.field, eps);
    let poho = pohozaev_residual(&state.field, state.multipliers.weak_form, eps);

    let format = parse_format(merge(args.format, cfg.format.clone()), Format::Json)?;
    let text = match format {
        Format::Json => json_line(&[
            ("dim", serde_json::Value::from(dim)),
            ("rho", num(rho)),
            ("L", num(l)),
            ("eps", num(eps)),
            ("energy", num(e.total)),
            ("kinetic", num(e.kinetic)),
            ("quartic", num(e.quartic)),
            ("sextic", num(e.sextic)),
            ("energy_gap", num(e.total + 3.0 / 32.0)),
            ("mu_weak", num(state.multipliers.weak_form)),
            ("mu_pohozaev", num(state.multipliers.pohozaev_form)),
            ("mu_discrepancy", num(state.multipliers.discrepancy)),
            ("pohozaev_residual", num(poho)),
            ("iterations", serde_json::Value::from(state.iterations)),
            ("residual", num(state.final_residual)),
            ("monotone", serde_json::Value::from(state.monotone_flag)),
        ]),
        Format::Csv => format!(
            "dim,rho,L,eps,energy,kinetic,quartic,sextic,energy_gap,mu_weak,mu_pohozaev,mu_discrepancy,pohozaev_residual,iterations,residual,monotone\n{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            dim,
            fmt_f64(rho),
            fmt_f64(l),
            fmt_f64(eps),
            fmt_f64(e.total),
            fmt_f64(e.kinetic),
            fmt_f64(e.quartic),
            fmt_f64(e.sextic),
            fmt_f64(e.total + 3.0 / 32.0),
            fmt_f64(state.multipliers.weak_form),
            fmt_f64(state.multipliers.pohozaev_form),
            fmt_f64(state.multipliers.discrepancy),
            fmt_f64(poho),
            state.iterations,
            fmt_f64(state.final_residual),
            state.monotone_flag
        ),
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = args.profile_out {
        let points: Vec<(f64, f64)> = state
            .field
            .grid()
            .nodes()
            .iter()
            .zip(state.field.values())
            .map(|(r, u)| (*r, *u))
            .collect();
        emit(Some(&path), &plot_data(&points))?;
    }
    Ok(0)
}

fn run_soliton(args: SolitonArgs, cfg: &FileConfig) -> Result<u8, CliError> {
    let dim = require(merge(args.dim, cfg.dim), "dim")?;
    let result = q_soliton(dim, None).map_err(CliError::from)?;
    let format = parse_format(merge(args.format, cfg.format.clone()), Format::Json)?;
    let text = match format {
        Format::Json => json_line(&[
            ("dim", serde_json::Value::from(dim)),
            ("shoot_parameter", num(result.shoot_parameter)),
            ("mass", num(result.mass)),
            (
                "identity_residuals",
                serde_json::Value::Array(
                    result.identity_residuals.iter().map(|r| num(*r)).collect(),
                ),
            ),
        ]),
        Format::Csv => format!(
            "dim,shoot_parameter,mass,res_grad_mass,res_quartic_mass,res_grad_quartic\n{},{},{},{},{},{}\n",
            dim,
            fmt_f64(result.shoot_parameter),
            fmt_f64(result.mass),
            fmt_f64(result.identity_residuals[0]),
            fmt_f64(result.identity_residuals[1]),
            fmt_f64(result.identity_residuals[2])
        ),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn validate_list(list: &[f64], name: &str) -> Result<(), CliError> {
    if list.len() < 3 {
        return Err(CliError::Validation(format!(
            "{name} list needs at least 3 increasing values (got {})",
            list.len()
        )));
    }
    if list.iter().any(|v| !(v.is_finite() && *v > 0.0)) || list.windows(2).any(|p| p[1] <= p[0])
    {
        return Err(CliError::Validation(format!(
            "{name} list must be positive and strictly increasing"
        )));
    }
    Ok(())
}

fn run_sweep_thermo(args: SweepThermoArgs, cfg: &FileConfig) -> Result<u8, CliError> {
    let dim = require(merge(args.dim, cfg.dim), "dim")?;
    let rho = check_rho(require(merge(args.rho, cfg.rho), "rho")?)?;
    let l_list = require(merge(args.l.clone(), cfg.l_list.clone()), "L")?;
    validate_list(&l_list, "L")?;
    let n = grid_cells(args.solver.n, cfg, 8192);
    let opts = sweep_options(&args.solver, args.margin, args.warm_start, cfg)?;
    let sweep = sweep_thermo(dim, rho, &l_list, n, &opts).map_err(CliError::from)?;
    let format = parse_format(merge(args.format, cfg.format.clone()), Format::Csv)?;
    let text = match format {
        Format::Csv => sweep_csv(&sweep.rows, false),
        Format::Json => sweep_json(&sweep.rows, false),
    };
    emit(merge(args.out, cfg.out.clone().map(PathBuf::from)).as_deref(), &text)?;
    Ok(0)
}

fn run_sweep_tf(args: SweepTfArgs, cfg: &FileConfig) -> Result<u8, CliError> {
    let dim = require(merge(args.dim, cfg.dim), "dim")?;
    let n_list = require(merge(args.n_particles.clone(), cfg.n_list.clone()), "N")?;
    validate_list(&n_list, "N")?;
    let trunc = require(merge(args.trunc, cfg.trunc), "trunc")?;
    let n = grid_cells(args.solver.n, cfg, 8192);
    let opts = sweep_options(&args.solver, args.margin, args.warm_start, cfg)?;
    let sweep = sweep_tf_limit(dim, &n_list, trunc, n, &opts).map_err(CliError::from)?;
    let format = parse_format(merge(args.format, cfg.format.clone()), Format::Csv)?;
    let text = match format {
        Format::Csv => sweep_csv(&sweep.rows, true),
        Format::Json => sweep_json(&sweep.rows, true),
    };
    emit(merge(args.out, cfg.out.clone().map(PathBuf::from)).as_deref(), &text)?;
    Ok(0)
}
