//! Run configuration: JSON file ingestion with strict key checking, flag
//! overrides, the seed resolution chain, and conversion into simulation
//! parameters.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::RunOptions;
use crate::model::{ModeFamily, SimParams};

/// Environment variable consulted when neither a flag nor the config file sets the
/// random seed.
pub const SEED_ENV_VAR: &str = "CAVCOOL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

/// Complete description of one simulation run: physics, numerics, sampling, and
/// artifact plumbing. Serializes losslessly to and from JSON.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "defaults::scenario")]
    pub scenario: String,
    pub n_atoms: usize,
    #[serde(default)]
    pub mode_family: ModeFamily,
    /// Defaults to the mode count implied by the family.
    #[serde(default)]
    pub n_modes: Option<usize>,
    /// Light shift per photon, κ units.
    pub u0: f64,
    /// Scattering rate per photon, κ units.
    pub gamma: f64,
    /// Pump-cavity detuning per mode; a single entry is broadcast to all modes.
    pub delta: Vec<f64>,
    /// Mode linewidths in units of the first (which must be 1).
    pub kappa: Vec<f64>,
    /// Pump amplitude per mode, κ units; a single entry is broadcast.
    pub eta: Vec<f64>,
    #[serde(default)]
    pub g_over_kappa: Option<f64>,
    #[serde(default)]
    pub gamma_atom_over_omega_r: Option<f64>,
    pub kappa_over_omega_r: f64,
    pub dt: f64,
    pub t_final: f64,
    pub trajectories: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Initial mean kinetic energy per atom, ω_R units.
    #[serde(default = "defaults::e_kin_init")]
    pub e_kin_init: f64,
    /// Steps between recorded samples.
    #[serde(default = "defaults::stride")]
    pub stride: usize,
    #[serde(default = "defaults::out_dir")]
    pub out_dir: String,
    #[serde(default = "defaults::formats")]
    pub formats: Vec<OutputFormat>,
}

pub(crate) mod defaults {
    use super::OutputFormat;

    pub fn scenario() -> String {
        "custom".into()
    }
    pub fn e_kin_init() -> f64 {
        400.0
    }
    pub fn stride() -> usize {
        200
    }
    pub fn out_dir() -> String {
        "out".into()
    }
    pub fn formats() -> Vec<OutputFormat> {
        vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg]
    }
}

const REQUIRED_KEYS: &[&str] = &[
    "n_atoms",
    "u0",
    "gamma",
    "delta",
    "kappa",
    "eta",
    "kappa_over_omega_r",
    "dt",
    "t_final",
    "trajectories",
];

const OPTIONAL_KEYS: &[&str] = &[
    "scenario",
    "mode_family",
    "n_modes",
    "g_over_kappa",
    "gamma_atom_over_omega_r",
    "seed",
    "e_kin_init",
    "stride",
    "out_dir",
    "formats",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config must be a JSON object")]
    NotAnObject,
    #[error("unknown config keys: {0}")]
    UnknownKeys(String),
    #[error("missing required config keys: {0}")]
    MissingKeys(String),
    #[error("{SEED_ENV_VAR} must be an unsigned integer, got {0:?}")]
    BadSeedEnv(String),
    #[error("mode family {family:?} defines {expected} modes but n_modes = {given}")]
    ModeCount {
        family: ModeFamily,
        expected: usize,
        given: usize,
    },
    #[error("{name} must list 1 or {expected} values, got {got}")]
    PerModeLength {
        name: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Parses a config file, reporting every unknown and every missing key at once
/// rather than stopping at the first.
pub fn parse_config_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let object = value.as_object().ok_or(ConfigError::NotAnObject)?;

    let mut unknown: Vec<&str> = object
        .keys()
        .map(String::as_str)
        .filter(|k| !REQUIRED_KEYS.contains(k) && !OPTIONAL_KEYS.contains(k))
        .collect();
    if !unknown.is_empty() {
        unknown.sort_unstable();
        return Err(ConfigError::UnknownKeys(unknown.join(", ")));
    }
    let missing: Vec<&str> = REQUIRED_KEYS
        .iter()
        .copied()
        .filter(|k| !object.contains_key(*k))
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::MissingKeys(missing.join(", ")));
    }
    Ok(serde_json::from_value(value)?)
}

/// Resolves the seed with precedence: explicit flag, then config file, then the
/// environment variable, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, ConfigError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| ConfigError::BadSeedEnv(text)),
        Err(_) => Ok(0),
    }
}

fn broadcast(name: &'static str, values: &[f64], n_modes: usize) -> Result<Vec<f64>, ConfigError> {
    match values.len() {
        1 => Ok(vec![values[0]; n_modes]),
        n if n == n_modes => Ok(values.to_vec()),
        got => Err(ConfigError::PerModeLength {
            name,
            expected: n_modes,
            got,
        }),
    }
}

impl RunConfig {
    /// Number of modes after resolving the default from the mode family.
    pub fn resolved_n_modes(&self) -> usize {
        self.n_modes.unwrap_or_else(|| self.mode_family.mode_count())
    }

    /// Builds the simulation parameter set and run options. `seed` must already be
    /// resolved through the flag/config/environment chain.
    pub fn to_sim_params(&self, seed: u64) -> Result<(SimParams, RunOptions), ConfigError> {
        let n_modes = self.resolved_n_modes();
        let expected = self.mode_family.mode_count();
        if n_modes != expected {
            return Err(ConfigError::ModeCount {
                family: self.mode_family,
                expected,
                given: n_modes,
            });
        }
        let delta = broadcast("delta", &self.delta, n_modes)?;
        let kappa = broadcast("kappa", &self.kappa, n_modes)?;
        let eta = broadcast("eta", &self.eta, n_modes)?
            .into_iter()
            .map(|e| Complex64::new(e, 0.0))
            .collect();
        let params = SimParams {
            n_atoms: self.n_atoms,
            n_modes,
            mode_family: self.mode_family,
            u0: self.u0,
            gamma0: self.gamma,
            delta,
            kappa,
            eta,
            g_over_kappa: self.g_over_kappa,
            gamma_atom_over_omega_r: self.gamma_atom_over_omega_r,
            kappa_over_omega_r: self.kappa_over_omega_r,
            dt: self.dt,
            t_final: self.t_final,
            n_trajectories: self.trajectories,
            seed,
        };
        let options = RunOptions {
            stride: self.stride,
            with_noise: true,
            e_kin_init: self.e_kin_init,
        };
        Ok((params, options))
    }
}
