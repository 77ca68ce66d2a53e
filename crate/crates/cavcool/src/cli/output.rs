//! Serialization of simulation results: the time-series CSV, the run summary
//! JSON document, and the atom-number scaling table.
//!
//! Floating-point values are written with Rust's shortest-round-trip formatting,
//! so rerunning with the same seed and thread count reproduces the files byte for
//! byte.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::analysis::FitResult;
use crate::cli::config::RunConfig;
use crate::integrator::EnsembleSeries;
use crate::predictor::AnalyticPredictions;

/// Machine-readable record of a completed (or aborted) scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scenario: String,
    /// One of `ok`, `no_cooling`, `diverged`, `predict_only`.
    pub status: String,
    /// The fully resolved configuration, including the seed actually used.
    pub config: RunConfig,
    pub parameter_warnings: Vec<String>,
    pub predictions: Option<AnalyticPredictions>,
    pub prediction_error: Option<String>,
    pub fit: Option<FitResult>,
    pub fit_error: Option<String>,
    pub n_trajectories: usize,
    pub n_diverged: usize,
    /// Mean photon number at the final recorded time, including the half photon
    /// of sampled vacuum noise per mode.
    pub photon_final_raw: Option<f64>,
    /// Final photon number with the vacuum floor subtracted.
    pub photon_final_coherent: Option<f64>,
    pub e_kin_final: Option<f64>,
    pub localization_final: Option<f64>,
    pub wall_clock_seconds: f64,
}

/// Writes the ensemble time series as `t,e_kin_mean,e_kin_sem,photon_mean,localization`.
pub fn write_series_csv(path: &Path, series: &EnsembleSeries) -> io::Result<()> {
    let mut out = String::from("t,e_kin_mean,e_kin_sem,photon_mean,localization\n");
    for i in 0..series.t.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            series.t[i],
            series.e_kin_mean[i],
            series.e_kin_sem[i],
            series.photon_mean[i],
            series.localization_mean[i],
        ));
    }
    fs::write(path, out)
}

/// Writes the run summary as pretty-printed JSON.
pub fn write_summary_json(path: &Path, summary: &Summary) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(summary).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// A single row of the atom-number scaling table.
#[derive(Debug, Clone, Copy)]
pub struct ScalingRow {
    pub n: usize,
    pub tau_c: f64,
    pub k_b_t: f64,
}

/// Writes the scan results as `n,tau_c,k_b_t` (cooling time in 1/κ, temperature
/// in ω_R).
pub fn write_scaling_csv(path: &Path, rows: &[ScalingRow]) -> io::Result<()> {
    let mut out = String::from("n,tau_c,k_b_t\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.n, row.tau_c, row.k_b_t));
    }
    fs::write(path, out)
}
