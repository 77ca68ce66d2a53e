//! Fixed-step Euler-Maruyama propagation: single trajectories with strided
//! observable recording, and reproducible parallel ensembles aggregated into
//! mean time series.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{empty_cavity_steady_state, drift_into, Drift, FieldEval};
use crate::model::{build_mode_basis, BasisError, ModeBasis, ParamError, SimParams, SystemState};
use crate::noise::{accumulate_induced, accumulate_spontaneous, trajectory_rng, NoiseIncrement};
use crate::observables::ObservableSet;

/// Momentum magnitude (ħk) beyond which a trajectory is declared diverged.
pub const MOMENTUM_GUARD: f64 = 1.0e3;
/// Single-mode photon number beyond which a trajectory is declared diverged.
pub const PHOTON_GUARD: f64 = 1.0e6;

/// Scratch buffers reused across steps so the hot loop does not allocate.
#[derive(Debug, Default)]
pub struct StepWorkspace {
    eval: FieldEval,
    drift: Drift,
    noise: NoiseIncrement,
}

impl StepWorkspace {
    pub fn new() -> Self {
        StepWorkspace::default()
    }
}

/// True while every coordinate is finite and inside the guard rails.
pub fn state_is_trusted(state: &SystemState) -> bool {
    state.theta.iter().all(|t| t.is_finite())
        && state
            .p
            .iter()
            .all(|p| p.is_finite() && p.abs() <= MOMENTUM_GUARD)
        && state
            .alpha
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite() && a.norm_sqr() <= PHOTON_GUARD)
}

fn apply_update(state: &mut SystemState, dt: f64, ws: &StepWorkspace) -> bool {
    for n in 0..state.n_atoms() {
        state.theta[n] += ws.drift.dtheta[n] * dt;
        state.p[n] += ws.drift.dp[n] * dt + ws.noise.dp[n];
    }
    for k in 0..state.n_modes() {
        state.alpha[k] += ws.drift.dalpha[k] * dt + ws.noise.dalpha[k];
    }
    state.t += dt;
    state_is_trusted(state)
}

/// One Euler-Maruyama step with both noise channels. Returns false once the state
/// leaves the trusted region (runaway momentum or photon number, or non-finite
/// values); callers should stop integrating at that point.
pub fn step<R: Rng + ?Sized>(
    state: &mut SystemState,
    basis: &ModeBasis,
    params: &SimParams,
    dt: f64,
    rng: &mut R,
    ws: &mut StepWorkspace,
) -> bool {
    drift_into(state, basis, params, &mut ws.eval, &mut ws.drift);
    ws.noise.reset(state.n_atoms(), state.n_modes());
    accumulate_spontaneous(&ws.eval, params, dt, rng, &mut ws.noise);
    accumulate_induced(&ws.eval, state, basis, params, dt, rng, &mut ws.noise);
    apply_update(state, dt, ws)
}

/// One forward-Euler step of the drift alone (both noise channels switched off).
pub fn step_deterministic(
    state: &mut SystemState,
    basis: &ModeBasis,
    params: &SimParams,
    dt: f64,
    ws: &mut StepWorkspace,
) -> bool {
    drift_into(state, basis, params, &mut ws.eval, &mut ws.drift);
    ws.noise.reset(state.n_atoms(), state.n_modes());
    apply_update(state, dt, ws)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TrajectoryStatus {
    Completed,
    Diverged { t: f64 },
}

/// Observables sampled along one trajectory plus its end state.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub samples: Vec<ObservableSet>,
    pub final_state: SystemState,
    pub status: TrajectoryStatus,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Record observables every this many steps (the initial and final states are
    /// always recorded).
    pub stride: usize,
    /// Integrate the stochastic equations; false gives the drift flow only.
    pub with_noise: bool,
    /// Initial mean kinetic energy per atom in ω_R units; momenta are drawn from a
    /// Gaussian with variance equal to this value.
    pub e_kin_init: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            stride: 200,
            with_noise: true,
            e_kin_init: 0.0,
        }
    }
}

/// Draws the standard initial condition: positions uniform over one period, momenta
/// Gaussian with ⟨p²⟩ = e_kin_init, and every mode at its empty-cavity steady state.
/// Draw order (all positions, then all momenta) is part of the reproducibility
/// contract.
pub fn sample_initial_state<R: Rng + ?Sized>(
    params: &SimParams,
    e_kin_init: f64,
    rng: &mut R,
) -> SystemState {
    use rand_distr::StandardNormal;
    let theta: Vec<f64> = (0..params.n_atoms)
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
        .collect();
    let sigma = e_kin_init.max(0.0).sqrt();
    let p: Vec<f64> = (0..params.n_atoms)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let alpha: Vec<Complex64> = (0..params.n_modes)
        .map(|k| empty_cavity_steady_state(params.eta[k], params.kappa[k], params.delta[k]))
        .collect();
    SystemState::new(theta, p, alpha)
}

/// Integrates one trajectory from a freshly sampled initial condition, recording
/// observables on the strided time grid. Stops early if the state diverges.
pub fn run_trajectory<R: Rng + ?Sized>(
    params: &SimParams,
    basis: &ModeBasis,
    options: &RunOptions,
    rng: &mut R,
) -> TrajectoryRecord {
    let mut state = sample_initial_state(params, options.e_kin_init, rng);
    let dt = params.dt;
    let n_steps = (params.t_final / dt).round().max(1.0) as usize;
    let stride = options.stride.max(1);

    let mut times = Vec::with_capacity(n_steps / stride + 2);
    let mut samples = Vec::with_capacity(n_steps / stride + 2);
    times.push(0.0);
    samples.push(ObservableSet::measure(&state));

    let mut ws = StepWorkspace::new();
    let mut status = TrajectoryStatus::Completed;
    for i in 1..=n_steps {
        let ok = if options.with_noise {
            step(&mut state, basis, params, dt, rng, &mut ws)
        } else {
            step_deterministic(&mut state, basis, params, dt, &mut ws)
        };
        if !ok {
            status = TrajectoryStatus::Diverged { t: i as f64 * dt };
            break;
        }
        if i % stride == 0 || i == n_steps {
            times.push(i as f64 * dt);
            samples.push(ObservableSet::measure(&state));
        }
    }
    TrajectoryRecord {
        times,
        samples,
        final_state: state,
        status,
    }
}

/// Ensemble averages on the shared time grid, in the simulation's working units
/// (time in κ⁻¹, energies in ω_R).
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EnsembleSeries {
    pub t: Vec<f64>,
    pub e_kin_mean: Vec<f64>,
    pub e_kin_sem: Vec<f64>,
    pub photon_mean: Vec<f64>,
    pub localization_mean: Vec<f64>,
    /// Trajectories requested.
    pub n_trajectories: usize,
    /// Trajectories excluded from the averages because they diverged.
    pub n_diverged: usize,
    pub kappa_over_omega_r: f64,
}

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("{diverged} of {total} trajectories diverged; results would be unreliable")]
    TooManyDiverged { diverged: usize, total: usize },
}

/// Runs the full ensemble in parallel and averages it. Each trajectory uses its own
/// counter-derived random stream, so the result is identical for any thread count.
/// Fails if more than 10% of trajectories diverge.
pub fn run_ensemble(params: &SimParams, options: &RunOptions) -> Result<EnsembleSeries, EnsembleError> {
    params.validate()?;
    let basis = build_mode_basis(params.mode_family)?;
    let records: Vec<TrajectoryRecord> = (0..params.n_trajectories)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(params.seed, i as u64);
            run_trajectory(params, &basis, options, &mut rng)
        })
        .collect();
    aggregate(&records, params)
}

fn aggregate(
    records: &[TrajectoryRecord],
    params: &SimParams,
) -> Result<EnsembleSeries, EnsembleError> {
    let total = records.len();
    let completed: Vec<&TrajectoryRecord> = records
        .iter()
        .filter(|r| r.status == TrajectoryStatus::Completed)
        .collect();
    let diverged = total - completed.len();
    if diverged * 10 > total {
        return Err(EnsembleError::TooManyDiverged { diverged, total });
    }

    let grid = &completed[0].times;
    let n_times = grid.len();
    let n = completed.len() as f64;
    let mut series = EnsembleSeries {
        t: grid.clone(),
        e_kin_mean: vec![0.0; n_times],
        e_kin_sem: vec![0.0; n_times],
        photon_mean: vec![0.0; n_times],
        localization_mean: vec![0.0; n_times],
        n_trajectories: total,
        n_diverged: diverged,
        kappa_over_omega_r: params.kappa_over_omega_r,
    };
    for i in 0..n_times {
        let mut sum_e = 0.0;
        let mut sum_e2 = 0.0;
        let mut sum_ph = 0.0;
        let mut sum_loc = 0.0;
        for rec in &completed {
            let obs = rec.samples[i];
            sum_e += obs.e_kin;
            sum_e2 += obs.e_kin * obs.e_kin;
            sum_ph += obs.photons;
            sum_loc += obs.localization;
        }
        let mean = sum_e / n;
        series.e_kin_mean[i] = mean;
        series.e_kin_sem[i] = if completed.len() > 1 {
            let var = (sum_e2 - n * mean * mean).max(0.0) / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        series.photon_mean[i] = sum_ph / n;
        series.localization_mean[i] = sum_loc / n;
    }
    Ok(series)
}
