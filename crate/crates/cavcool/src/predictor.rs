//! Closed-form predictions for the cooling performance: position-averaged friction
//! and diffusion, equilibrium temperature, cooling time, the saturation-scaled and
//! free-space (Doppler) reference forms, the spontaneous-photon budget, and the
//! scaling with mode multiplicity.

use serde::Serialize;
use thiserror::Error;

use crate::model::SimParams;

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("no cooling channel: pump strength and light shift must both be nonzero")]
    NoCoolingChannel,
    #[error("prediction requires the coupling ratio g/κ, which is not set")]
    MissingCoupling,
    #[error("saturation must lie in (0, 1), got {0}")]
    SaturationOutOfRange(f64),
    #[error("photon budget needs either (γ, U0) or (Γ/ω_R, g/κ)")]
    PhotonBudgetUnavailable,
    #[error("photon budget forms disagree: scattering form {gamma_form}, coupling form {coupling_form}")]
    PhotonBudgetMismatch { gamma_form: f64, coupling_form: f64 },
    #[error("mode multiplicity must be at least 1")]
    InvalidMultiplicity,
}

/// Everything the closed-form theory says about a parameter set. Optional blocks are
/// filled when the parameters carry the coupling ratio g/κ and/or the free-space
/// linewidth Γ/ω_R needed to evaluate them.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AnalyticPredictions {
    /// Position-averaged friction −η²U0²/(4κ⁴), force per velocity in code units.
    pub f1_bar: f64,
    /// Position-averaged momentum diffusion η²U0²/(8κ³) in code units.
    pub d_bar: f64,
    /// Equilibrium temperature κ/2, in κ units (always exactly 0.5·κ).
    pub k_b_t_kappa: f64,
    pub k_b_t_omega_r: f64,
    /// Cooling time κ⁴/(η²U0²)·ω_R⁻¹ expressed in κ⁻¹.
    pub tau_c_kappa: f64,
    pub tau_c_omega_r: f64,
    /// Saturation s = η²U0²/(4κ²g²).
    pub s: Option<f64>,
    /// Friction rewritten as −s(g/κ)².
    pub f1_scaled: Option<f64>,
    /// Cooling time rewritten as κ²/(4sg²)·ω_R⁻¹, in κ⁻¹; equals tau_c_kappa.
    pub tau_c_scaled_kappa: Option<f64>,
    /// Free-space reference friction −s at matched saturation.
    pub f1_doppler: Option<f64>,
    /// Free-space reference cooling time 1/(4s) in ω_R⁻¹.
    pub tau_c_doppler_omega_r: Option<f64>,
    /// Spontaneously scattered photons per atom per cooling time.
    pub n_ph: Option<f64>,
    /// Free-space reference photon count Γ/(2ω_R).
    pub n_ph_doppler: Option<f64>,
    /// Number of degenerate modes the prediction assumes.
    pub mode_multiplicity: usize,
    /// |M·N·U0| in κ units; collective cooling requires this ≲ κ.
    pub mn_u0_over_kappa: f64,
    /// True when the collective validity condition MN|U0| ≤ κ holds.
    pub validity_condition_met: bool,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ScaledPredictions {
    pub s: f64,
    pub f1_bar: f64,
    pub tau_c_kappa: f64,
    pub tau_c_omega_r: f64,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct DopplerReference {
    pub f1_bar: f64,
    pub tau_c_omega_r: f64,
    pub n_ph: Option<f64>,
}

fn pump_and_shift(params: &SimParams) -> Result<(f64, f64, f64), PredictError> {
    let eta = params.eta[0].norm();
    let kappa = params.kappa[0];
    if eta == 0.0 || params.u0 == 0.0 {
        return Err(PredictError::NoCoolingChannel);
    }
    Ok((eta, params.u0, kappa))
}

/// Single-atom, single-standing-wave predictions in code units (k = 1, rates in κ).
pub fn predict_single_atom(params: &SimParams) -> Result<AnalyticPredictions, PredictError> {
    predictions_for_multiplicity(params, 1)
}

/// Saturation-scaled forms of the friction and cooling time; requires g/κ.
pub fn predict_scaled(params: &SimParams) -> Result<ScaledPredictions, PredictError> {
    let (eta, u0, kappa) = pump_and_shift(params)?;
    let g = params.g_over_kappa.ok_or(PredictError::MissingCoupling)?;
    let s = eta * eta * u0 * u0 / (4.0 * kappa * kappa * g * g);
    let f1_bar = -s * g * g / (kappa * kappa);
    let tau_c_omega_r = kappa * kappa / (4.0 * s * g * g);
    Ok(ScaledPredictions {
        s,
        f1_bar,
        tau_c_kappa: tau_c_omega_r * params.kappa_over_omega_r,
        tau_c_omega_r,
    })
}

/// Free-space Doppler cooling at the same saturation: the benchmark the cavity
/// scheme is measured against.
pub fn doppler_reference(
    s: f64,
    gamma_atom_over_omega_r: Option<f64>,
) -> Result<DopplerReference, PredictError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(PredictError::SaturationOutOfRange(s));
    }
    Ok(DopplerReference {
        f1_bar: -s,
        tau_c_omega_r: 1.0 / (4.0 * s),
        n_ph: gamma_atom_over_omega_r.map(|g| 0.5 * g),
    })
}

/// Photons spontaneously scattered per atom during one cooling time. Computed from
/// the per-photon scattering rate (γκ²/(2ω_R U0²)) and/or from the atomic linewidth
/// and coupling ((Γ/2ω_R)(κ/g)²); when both parameter sets are present the two must
/// agree to 10⁻¹².
pub fn photon_budget(params: &SimParams) -> Result<f64, PredictError> {
    let kappa = params.kappa[0];
    let gamma_form = if params.gamma0 > 0.0 && params.u0 != 0.0 {
        Some(params.gamma0 * kappa * kappa / (2.0 * params.u0 * params.u0)
            * params.kappa_over_omega_r)
    } else {
        None
    };
    let coupling_form = match (params.gamma_atom_over_omega_r, params.g_over_kappa) {
        (Some(gamma_atom), Some(g)) if g != 0.0 => {
            Some(0.5 * gamma_atom * (kappa / g) * (kappa / g))
        }
        _ => None,
    };
    match (gamma_form, coupling_form) {
        (Some(a), Some(b)) => {
            if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) {
                Ok(a)
            } else {
                Err(PredictError::PhotonBudgetMismatch {
                    gamma_form: a,
                    coupling_form: b,
                })
            }
        }
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => Err(PredictError::PhotonBudgetUnavailable),
    }
}

/// Predictions when the pump drives M degenerate modes: the temperature is
/// unchanged while cooling time and photon budget drop by 1/M. The collective
/// validity condition MN|U0| ≲ κ is evaluated and reported, never enforced.
pub fn ring_multimode_predictions(
    params: &SimParams,
    multiplicity: usize,
) -> Result<AnalyticPredictions, PredictError> {
    if multiplicity < 1 {
        return Err(PredictError::InvalidMultiplicity);
    }
    predictions_for_multiplicity(params, multiplicity)
}

fn predictions_for_multiplicity(
    params: &SimParams,
    multiplicity: usize,
) -> Result<AnalyticPredictions, PredictError> {
    let (eta, u0, kappa) = pump_and_shift(params)?;
    let m = multiplicity as f64;
    let drive = eta * eta * u0 * u0;

    let f1_bar = -drive / (4.0 * kappa.powi(4));
    let d_bar = drive / (8.0 * kappa.powi(3));
    let k_b_t_kappa = kappa / 2.0;
    let tau_c_omega_r = kappa.powi(4) / drive / m;
    let tau_c_kappa = tau_c_omega_r * params.kappa_over_omega_r;

    let scaled = predict_scaled(params).ok();
    let s = scaled.map(|sc| sc.s);
    let doppler = s.and_then(|s| doppler_reference(s, params.gamma_atom_over_omega_r).ok());
    let n_ph = photon_budget(params).ok().map(|n| n / m);

    let mn_u0 = m * params.n_atoms as f64 * u0.abs();
    Ok(AnalyticPredictions {
        f1_bar,
        d_bar,
        k_b_t_kappa,
        k_b_t_omega_r: k_b_t_kappa * params.kappa_over_omega_r,
        tau_c_kappa,
        tau_c_omega_r,
        s,
        f1_scaled: scaled.map(|sc| sc.f1_bar),
        tau_c_scaled_kappa: scaled.map(|sc| sc.tau_c_kappa / m),
        f1_doppler: doppler.map(|d| d.f1_bar),
        tau_c_doppler_omega_r: doppler.map(|d| d.tau_c_omega_r),
        n_ph,
        n_ph_doppler: doppler.and_then(|d| d.n_ph),
        mode_multiplicity: multiplicity,
        mn_u0_over_kappa: mn_u0 / kappa,
        validity_condition_met: mn_u0 <= kappa,
    })
}
