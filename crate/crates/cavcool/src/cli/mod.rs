//! Command-line front end: argument parsing, configuration assembly, scenario
//! execution, and artifact writing.
//!
//! A run is described by a [`config::RunConfig`], assembled from exactly one
//! base source — a named preset, a JSON file, or a full set of flags — with
//! individual flags overriding the base. Exit codes: 0 on success, 1 for
//! usage or configuration errors, 2 when the run completed but no cooling was
//! detected, 3 when the integration diverged.

pub mod config;
pub mod output;
pub mod presets;
pub mod svg;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{fit_exponential, FitResult};
use crate::cli::config::{parse_config_file, resolve_seed, OutputFormat, RunConfig};
use crate::cli::output::{ScalingRow, Summary};
use crate::cli::presets::PresetName;
use crate::integrator::{run_ensemble, EnsembleError};
use crate::model::{ModeFamily, SimParams};
use crate::predictor::ring_multimode_predictions;

/// Exit code for runs that completed but showed no exponential cooling.
pub const EXIT_NO_COOLING: i32 = 2;
/// Exit code for runs aborted because too many trajectories diverged.
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cavcool",
    version,
    about = "Stochastic ensemble simulator for cavity-assisted atom cooling",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write series.csv, summary.json, and plot.svg.
    Run(RunArgs),
    /// Repeat a scenario over several atom numbers under the
    /// constant-collective-drive scaling rule and write scaling.csv.
    ScanN(ScanArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Named scenario to start from.
    #[arg(long, value_enum)]
    pub preset: Option<PresetName>,
    /// JSON configuration file (alternative to --preset).
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Number of atoms.
    #[arg(long)]
    pub n_atoms: Option<usize>,
    /// Number of degenerate running-wave modes.
    #[arg(long)]
    pub n_modes: Option<usize>,
    /// Light shift per photon, κ units.
    #[arg(long, allow_negative_numbers = true)]
    pub u0: Option<f64>,
    /// Scattering rate per photon, κ units.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Pump-cavity detuning per mode, κ units (comma separated; one value broadcasts).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub delta: Option<Vec<f64>>,
    /// Pump amplitude per mode, κ units (comma separated; one value broadcasts).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eta: Option<Vec<f64>>,
    /// Cavity linewidth in recoil frequencies.
    #[arg(long)]
    pub kappa_over_omega_r: Option<f64>,
    /// Integration step, 1/κ units.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulated span, 1/κ units.
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Stochastic trajectories in the ensemble.
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Random seed; falls back to the config file, then $CAVCOOL_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results are identical either way.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Artifacts to write: comma-separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub formats: Option<Vec<OutputFormat>>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Write analytic predictions to summary.json without simulating.
    #[arg(long)]
    pub predict_only: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Atom numbers to scan, e.g. --n 1,2,4,8.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
}

/// Outcome of one scenario run: the process exit code plus the fit, when one
/// converged.
pub struct ScenarioReport {
    pub exit_code: i32,
    pub fit: Option<FitResult>,
}

/// Runs the parsed command line to completion and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run(args) => run_command(&args),
        Command::ScanN(args) => scan_command(&args),
    }
}

fn run_command(args: &RunArgs) -> i32 {
    let config = match build_config(&args.common) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            return 1;
        }
    };
    let seed = match resolve_seed(args.common.seed, config.seed) {
        Ok(seed) => seed,
        Err(message) => {
            eprintln!("error: {message}");
            return 1;
        }
    };
    match run_scenario(&config, seed, args.common.threads, args.predict_only) {
        Ok(report) => report.exit_code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn scan_command(args: &ScanArgs) -> i32 {
    let base = match build_config(&args.common) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            return 1;
        }
    };
    let seed = match resolve_seed(args.common.seed, base.seed) {
        Ok(seed) => seed,
        Err(message) => {
            eprintln!("error: {message}");
            return 1;
        }
    };
    let root = PathBuf::from(&base.out_dir);
    if let Err(e) = std::fs::create_dir_all(&root) {
        eprintln!("error: cannot create {}: {e}", root.display());
        return 1;
    }
    let mut rows = Vec::new();
    let mut exit_code = 0;
    for &n in &args.n {
        let mut scaled = presets::scale_for_atom_number(&base, n);
        scaled.scenario = format!("{}_n{}", base.scenario, n.max(1));
        scaled.out_dir = root.join(format!("n_{}", n.max(1))).display().to_string();
        eprintln!("scan: n = {} ...", n.max(1));
        match run_scenario(&scaled, seed, args.common.threads, false) {
            Ok(report) => {
                if let Some(fit) = &report.fit {
                    rows.push(ScalingRow {
                        n: n.max(1),
                        tau_c: fit.tau_c,
                        k_b_t: fit.k_b_t_omega_r,
                    });
                }
                exit_code = exit_code.max(report.exit_code);
            }
            Err(message) => {
                eprintln!("error: {message}");
                return 1;
            }
        }
    }
    if let Err(e) = output::write_scaling_csv(&root.join("scaling.csv"), &rows) {
        eprintln!("error: cannot write scaling.csv: {e}");
        return 1;
    }
    exit_code
}

/// Assembles the run configuration from the chosen base source plus flag
/// overrides.
pub fn build_config(common: &CommonArgs) -> Result<RunConfig, String> {
    let mut config = if let Some(preset) = common.preset {
        presets::build(preset, common.n_atoms)
    } else if let Some(path) = &common.config {
        parse_config_file(path).map_err(|e| e.to_string())?
    } else {
        config_from_flags(common)?
    };
    apply_overrides(&mut config, common);
    Ok(config)
}

fn config_from_flags(common: &CommonArgs) -> Result<RunConfig, String> {
    let mut missing = Vec::new();
    if common.n_atoms.is_none() {
        missing.push("--n-atoms");
    }
    if common.u0.is_none() {
        missing.push("--u0");
    }
    if common.gamma.is_none() {
        missing.push("--gamma");
    }
    if common.delta.is_none() {
        missing.push("--delta");
    }
    if common.eta.is_none() {
        missing.push("--eta");
    }
    if common.kappa_over_omega_r.is_none() {
        missing.push("--kappa-over-omega-r");
    }
    if common.dt.is_none() {
        missing.push("--dt");
    }
    if common.t_final.is_none() {
        missing.push("--t-final");
    }
    if common.trajectories.is_none() {
        missing.push("--trajectories");
    }
    if !missing.is_empty() {
        return Err(format!(
            "no --preset or --config given, and the flag set is incomplete; missing: {}",
            missing.join(", ")
        ));
    }
    Ok(RunConfig {
        scenario: "custom".to_string(),
        n_atoms: common.n_atoms.unwrap(),
        mode_family: family_for_mode_count(common.n_modes.unwrap_or(1), ModeFamily::SingleCosine),
        n_modes: common.n_modes,
        u0: common.u0.unwrap(),
        gamma: common.gamma.unwrap(),
        delta: common.delta.clone().unwrap(),
        kappa: vec![1.0],
        eta: common.eta.clone().unwrap(),
        g_over_kappa: None,
        gamma_atom_over_omega_r: None,
        kappa_over_omega_r: common.kappa_over_omega_r.unwrap(),
        dt: common.dt.unwrap(),
        t_final: common.t_final.unwrap(),
        trajectories: common.trajectories.unwrap(),
        seed: None,
        e_kin_init: config::defaults::e_kin_init(),
        stride: config::defaults::stride(),
        out_dir: config::defaults::out_dir(),
        formats: config::defaults::formats(),
    })
}

/// Keeps the existing family when the requested count already matches it;
/// otherwise a count of 1 means the standing-wave mode and anything larger a
/// degenerate running-wave set.
fn family_for_mode_count(count: usize, current: ModeFamily) -> ModeFamily {
    if count == current.mode_count() {
        current
    } else if count <= 1 {
        ModeFamily::SingleCosine
    } else {
        ModeFamily::DegenerateSet(count)
    }
}

fn apply_overrides(config: &mut RunConfig, common: &CommonArgs) {
    if let Some(n) = common.n_atoms {
        config.n_atoms = n;
    }
    if let Some(m) = common.n_modes {
        config.mode_family = family_for_mode_count(m, config.mode_family);
        config.n_modes = Some(m.max(1));
    }
    if let Some(v) = common.u0 {
        config.u0 = v;
    }
    if let Some(v) = common.gamma {
        config.gamma = v;
    }
    if let Some(v) = &common.delta {
        config.delta = v.clone();
    }
    if let Some(v) = &common.eta {
        config.eta = v.clone();
    }
    if let Some(v) = common.kappa_over_omega_r {
        config.kappa_over_omega_r = v;
    }
    if let Some(v) = common.dt {
        config.dt = v;
    }
    if let Some(v) = common.t_final {
        config.t_final = v;
    }
    if let Some(v) = common.trajectories {
        config.trajectories = v;
    }
    if let Some(dir) = &common.out {
        config.out_dir = dir.display().to_string();
    }
    if let Some(formats) = &common.formats {
        config.formats = formats.clone();
    }
}

/// Maps simulation parameters onto the convention the closed-form estimates
/// assume before asking for predictions.
///
/// The running-wave mode functions used by the simulation have unit amplitude,
/// while the closed-form multi-mode estimates are written for mode functions
/// whose mean-square weight matches a single standing wave, with the leftover
/// amplitude absorbed into the coupling and pump strengths.  For an M-mode
/// family that bridge is `u0 -> M u0`, `gamma0 -> M gamma0`, `eta -> sqrt(M)
/// eta`; without it the reported time scale would refer to a lattice M^2 times
/// shallower than the one actually simulated.  Single-mode runs pass through
/// untouched.
fn prediction_inputs(params: &SimParams) -> (SimParams, usize) {
    let m = params.n_modes.max(1);
    if m == 1 {
        return (params.clone(), 1);
    }
    let mf = m as f64;
    let mut mapped = params.clone();
    mapped.u0 *= mf;
    mapped.gamma0 *= mf;
    for eta in &mut mapped.eta {
        *eta *= mf.sqrt();
    }
    (mapped, m)
}

/// Runs one fully resolved scenario: simulate (unless `predict_only`), fit,
/// and write the requested artifacts into the configured output directory.
///
/// `Err` covers configuration-level failures (exit code 1); everything that
/// produced a summary comes back as `Ok` with the exit code inside.
pub fn run_scenario(
    config: &RunConfig,
    seed: u64,
    threads: Option<usize>,
    predict_only: bool,
) -> Result<ScenarioReport, String> {
    let started = Instant::now();
    let (params, options) = config.to_sim_params(seed).map_err(|e| e.to_string())?;
    let warnings = params.validate().map_err(|e| e.to_string())?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }

    let mut echo = config.clone();
    echo.seed = Some(seed);
    let (prediction_params, multiplicity) = prediction_inputs(&params);
    let (predictions, prediction_error) =
        match ring_multimode_predictions(&prediction_params, multiplicity) {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e.to_string())),
        };

    let out_dir = PathBuf::from(&config.out_dir);
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    let mut summary = Summary {
        scenario: config.scenario.clone(),
        status: String::new(),
        config: echo,
        parameter_warnings: warnings,
        predictions,
        prediction_error,
        fit: None,
        fit_error: None,
        n_trajectories: 0,
        n_diverged: 0,
        photon_final_raw: None,
        photon_final_coherent: None,
        e_kin_final: None,
        localization_final: None,
        wall_clock_seconds: 0.0,
    };
    let write_summary = |summary: &Summary| -> Result<(), String> {
        if config.formats.contains(&OutputFormat::Json) {
            output::write_summary_json(&out_dir.join("summary.json"), summary)
                .map_err(|e| format!("cannot write summary.json: {e}"))?;
        }
        Ok(())
    };

    if predict_only {
        summary.status = "predict_only".to_string();
        summary.wall_clock_seconds = started.elapsed().as_secs_f64();
        write_summary(&summary)?;
        return Ok(ScenarioReport {
            exit_code: 0,
            fit: None,
        });
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| format!("cannot build thread pool: {e}"))?;
    match pool.install(|| run_ensemble(&params, &options)) {
        Err(EnsembleError::TooManyDiverged { diverged, total }) => {
            eprintln!("error: {diverged} of {total} trajectories diverged");
            summary.status = "diverged".to_string();
            summary.n_trajectories = total;
            summary.n_diverged = diverged;
            summary.wall_clock_seconds = started.elapsed().as_secs_f64();
            write_summary(&summary)?;
            Ok(ScenarioReport {
                exit_code: EXIT_DIVERGED,
                fit: None,
            })
        }
        Err(other) => Err(other.to_string()),
        Ok(series) => {
            summary.n_trajectories = series.n_trajectories;
            summary.n_diverged = series.n_diverged;
            summary.photon_final_raw = series.photon_mean.last().copied();
            summary.photon_final_coherent = summary
                .photon_final_raw
                .map(|p| p - 0.5 * params.n_modes as f64);
            summary.e_kin_final = series.e_kin_mean.last().copied();
            summary.localization_final = series.localization_mean.last().copied();

            let (exit_code, fit) = match fit_exponential(&series) {
                Ok(fit) => {
                    summary.status = "ok".to_string();
                    summary.fit = Some(fit.clone());
                    (0, Some(fit))
                }
                Err(e) => {
                    eprintln!("note: {e}");
                    summary.status = "no_cooling".to_string();
                    summary.fit_error = Some(e.to_string());
                    (EXIT_NO_COOLING, None)
                }
            };

            if config.formats.contains(&OutputFormat::Csv) {
                output::write_series_csv(&out_dir.join("series.csv"), &series)
                    .map_err(|e| format!("cannot write series.csv: {e}"))?;
            }
            if config.formats.contains(&OutputFormat::Svg) {
                svg::write_cooling_plot(&out_dir.join("plot.svg"), &series, fit.as_ref())
                    .map_err(|e| format!("cannot write plot.svg: {e}"))?;
            }
            summary.wall_clock_seconds = started.elapsed().as_secs_f64();
            write_summary(&summary)?;
            Ok(ScenarioReport { exit_code, fit })
        }
    }
}
