//! Per-snapshot measurements on the atom-field state: kinetic temperature, photon
//! numbers, spatial localization, and the effective saturation of the scatterers.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::{ModeBasis, SimParams, SystemState};

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("saturation requires the coupling ratio g/κ, which is not set")]
    CouplingUnset,
}

/// Mean kinetic energy per atom in ω_R units (p in ħk, so this is just ⟨p²⟩).
pub fn kinetic_energy_per_atom(state: &SystemState) -> f64 {
    if state.n_atoms() == 0 {
        return 0.0;
    }
    state.p.iter().map(|p| p * p).sum::<f64>() / state.n_atoms() as f64
}

/// Photon number in each mode, |α_k|².
pub fn photon_numbers(state: &SystemState) -> Vec<f64> {
    state.alpha.iter().map(Complex64::norm_sqr).collect()
}

/// Total intracavity photon number, Σ_k |α_k|².
pub fn total_photons(state: &SystemState) -> f64 {
    state.alpha.iter().map(Complex64::norm_sqr).sum()
}

/// Spatial bunching measure ⟨cos²θ⟩ over the atoms: 1/2 for a uniform gas, → 1 for
/// atoms pinned at the standing-wave antinodes.
pub fn localization(state: &SystemState) -> f64 {
    if state.n_atoms() == 0 {
        return 0.0;
    }
    state.theta.iter().map(|t| t.cos().powi(2)).sum::<f64>() / state.n_atoms() as f64
}

/// Saturation estimate from the field the atoms actually see:
/// s = ⟨|E(θ_n)|²⟩ (u0² + γ0²) / (g/κ)², with all rates in κ units.
pub fn instantaneous_saturation(
    state: &SystemState,
    basis: &ModeBasis,
    params: &SimParams,
) -> Result<f64, ObservableError> {
    let g = params.g_over_kappa.ok_or(ObservableError::CouplingUnset)?;
    if state.n_atoms() == 0 {
        return Ok(0.0);
    }
    let mean_intensity = state
        .theta
        .iter()
        .map(|&t| basis.field_and_gradient(&state.alpha, t).0.norm_sqr())
        .sum::<f64>()
        / state.n_atoms() as f64;
    Ok(mean_intensity * (params.u0 * params.u0 + params.gamma0 * params.gamma0) / (g * g))
}

/// Closed-form saturation of the driven empty cavity at the reference detuning,
/// s = η² u0² / (4 κ² g²), using the first mode's pump and loss.
pub fn saturation_closed_form(params: &SimParams) -> Result<f64, ObservableError> {
    let g = params.g_over_kappa.ok_or(ObservableError::CouplingUnset)?;
    let eta = params.eta[0].norm();
    let kappa = params.kappa[0];
    Ok(eta * eta * params.u0 * params.u0 / (4.0 * kappa * kappa * g * g))
}

/// The scalar observables recorded along a trajectory.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ObservableSet {
    /// Mean kinetic energy per atom, ω_R units.
    pub e_kin: f64,
    /// Total photon number over all modes.
    pub photons: f64,
    /// ⟨cos²θ⟩ over the atoms.
    pub localization: f64,
}

impl ObservableSet {
    pub fn measure(state: &SystemState) -> Self {
        ObservableSet {
            e_kin: kinetic_energy_per_atom(state),
            photons: total_photons(state),
            localization: localization(state),
        }
    }
}
