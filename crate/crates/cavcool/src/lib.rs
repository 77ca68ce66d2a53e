//! Semiclassical ensemble simulator for atoms cooled by coherent scattering into
//! driven cavity modes, with analytic predictions and scan tooling built around the
//! same model.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod integrator;
pub mod model;
pub mod noise;
pub mod observables;
pub mod predictor;

pub use predictor::{
    doppler_reference, photon_budget, predict_scaled, predict_single_atom,
    ring_multimode_predictions, AnalyticPredictions, DopplerReference, PredictError,
    ScaledPredictions,
};

pub use analysis::{
    effective_momentum_diffusion, fit_exponential, fit_series, friction_scan, local_friction,
    static_field, FitError, FitResult, FrictionScan, FrictionScanPoint, ScanError,
};

pub use dynamics::{dipole_force, drift, field_drift, radiation_pressure_force, Drift};
pub use integrator::{
    run_ensemble, run_trajectory, sample_initial_state, step, step_deterministic, EnsembleError,
    EnsembleSeries, RunOptions, StepWorkspace, TrajectoryRecord, TrajectoryStatus,
};
pub use observables::{
    instantaneous_saturation, kinetic_energy_per_atom, localization, photon_numbers,
    saturation_closed_form, total_photons, ObservableSet,
};
pub use noise::{
    diffusion_matrix, induced_increments, spontaneous_increments, trajectory_rng, NoiseIncrement,
};
pub use model::{
    build_mode_basis, field_amplitude, field_gradient, ModeBasis, ModeFamily, SimParams,
    SystemState, UnitSystem,
};
