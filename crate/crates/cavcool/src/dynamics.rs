//! Deterministic drift of the coupled atom-field equations: dipole and
//! radiation-pressure forces on the atoms and the driven, damped, atom-shifted
//! evolution of the mode amplitudes.

use num_complex::Complex64;

use crate::model::{ModeBasis, SimParams, SystemState, UnitSystem};

/// Per-step field quantities shared by drift and noise: the field and its gradient at
/// every atom, and the back-action sums S_k = Σ_n E(θ_n) f_k*(θ_n).
#[derive(Debug, Clone, Default)]
pub struct FieldEval {
    pub e: Vec<Complex64>,
    pub de: Vec<Complex64>,
    pub coupling: Vec<Complex64>,
    fbuf: Vec<Complex64>,
}

impl FieldEval {
    pub fn compute(&mut self, state: &SystemState, basis: &ModeBasis) {
        let n_atoms = state.n_atoms();
        let n_modes = basis.len();
        self.e.clear();
        self.de.clear();
        self.e.resize(n_atoms, Complex64::new(0.0, 0.0));
        self.de.resize(n_atoms, Complex64::new(0.0, 0.0));
        self.coupling.clear();
        self.coupling.resize(n_modes, Complex64::new(0.0, 0.0));
        self.fbuf.resize(n_modes, Complex64::new(0.0, 0.0));
        for n in 0..n_atoms {
            let theta = state.theta[n];
            let mut e = Complex64::new(0.0, 0.0);
            let mut de = Complex64::new(0.0, 0.0);
            for k in 0..n_modes {
                let f = basis.eval(k, theta);
                self.fbuf[k] = f;
                e += f * state.alpha[k];
                de += basis.gradient(k, theta) * state.alpha[k];
            }
            self.e[n] = e;
            self.de[n] = de;
            for k in 0..n_modes {
                self.coupling[k] += e * self.fbuf[k].conj();
            }
        }
    }
}

/// Deterministic rates of change of every state component, per unit κ⁻¹ time.
#[derive(Debug, Clone, Default)]
pub struct Drift {
    pub dtheta: Vec<f64>,
    pub dp: Vec<f64>,
    pub dalpha: Vec<Complex64>,
}

impl Drift {
    fn resize(&mut self, n_atoms: usize, n_modes: usize) {
        self.dtheta.clear();
        self.dtheta.resize(n_atoms, 0.0);
        self.dp.clear();
        self.dp.resize(n_atoms, 0.0);
        self.dalpha.clear();
        self.dalpha.resize(n_modes, Complex64::new(0.0, 0.0));
    }
}

/// Dipole force −U0 [E ∇E* + E* ∇E] on atom n, in ħk per κ⁻¹.
pub fn dipole_force(state: &SystemState, basis: &ModeBasis, params: &SimParams, n: usize) -> f64 {
    let (e, de) = basis.field_and_gradient(&state.alpha, state.theta[n]);
    dipole_from_field(params.u0, e, de)
}

/// Radiation-pressure force iγ [E ∇E* − E* ∇E] on atom n, in ħk per κ⁻¹.
pub fn radiation_pressure_force(
    state: &SystemState,
    basis: &ModeBasis,
    params: &SimParams,
    n: usize,
) -> f64 {
    let (e, de) = basis.field_and_gradient(&state.alpha, state.theta[n]);
    radiation_pressure_from_field(params.gamma0, e, de)
}

pub(crate) fn dipole_from_field(u0: f64, e: Complex64, de: Complex64) -> f64 {
    -u0 * 2.0 * (e * de.conj()).re
}

pub(crate) fn radiation_pressure_from_field(gamma0: f64, e: Complex64, de: Complex64) -> f64 {
    -2.0 * gamma0 * (e * de.conj()).im
}

/// Drift of the mode amplitudes: pump, detuning, decay, and the collective
/// dispersive/absorptive shift from all atoms.
pub fn field_drift(state: &SystemState, basis: &ModeBasis, params: &SimParams) -> Vec<Complex64> {
    let mut eval = FieldEval::default();
    eval.compute(state, basis);
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    field_drift_into(&eval, state, params, &mut out);
    out
}

// the index walks four parallel arrays at once; an iterator chain would obscure that
#[allow(clippy::needless_range_loop)]
pub(crate) fn field_drift_into(
    eval: &FieldEval,
    state: &SystemState,
    params: &SimParams,
    out: &mut [Complex64],
) {
    for k in 0..out.len() {
        let a = state.alpha[k];
        let s = eval.coupling[k];
        out[k] = -params.eta[k].conj()
            + Complex64::new(0.0, 1.0) * (params.delta[k] * a - params.u0 * s)
            - (params.kappa[k] * a + params.gamma0 * s);
    }
}

/// Full deterministic drift of the system.
pub fn drift(state: &SystemState, basis: &ModeBasis, params: &SimParams) -> Drift {
    let mut eval = FieldEval::default();
    let mut out = Drift::default();
    drift_into(state, basis, params, &mut eval, &mut out);
    out
}

pub(crate) fn drift_into(
    state: &SystemState,
    basis: &ModeBasis,
    params: &SimParams,
    eval: &mut FieldEval,
    out: &mut Drift,
) {
    eval.compute(state, basis);
    out.resize(state.n_atoms(), basis.len());
    for n in 0..state.n_atoms() {
        out.dtheta[n] = UnitSystem::position_rate(state.p[n], params.kappa_over_omega_r);
        out.dp[n] = dipole_from_field(params.u0, eval.e[n], eval.de[n])
            + radiation_pressure_from_field(params.gamma0, eval.e[n], eval.de[n]);
    }
    field_drift_into(eval, state, params, &mut out.dalpha);
}

/// Empty-cavity steady state α_ss = −η* / (κ − iΔ) of a single mode.
pub fn empty_cavity_steady_state(eta: Complex64, kappa: f64, delta: f64) -> Complex64 {
    -eta.conj() / Complex64::new(kappa, -delta)
}
