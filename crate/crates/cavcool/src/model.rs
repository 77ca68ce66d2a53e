//! Core data model: unit conventions, simulation parameters, mode bases, and the
//! dynamical state of atoms plus cavity field amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Marker for the scaled unit system used throughout.
///
/// Positions are phases θ = k·x, momenta are in units of ħk, all rates are in units of
/// the reference mode linewidth κ (so κ = 1 for the reference mode), time is in κ⁻¹,
/// and kinetic energy per atom is p² in units of the recoil frequency ω_R = ħk²/2m.
pub struct UnitSystem;

impl UnitSystem {
    /// Kinetic energy of one atom in ω_R units, given its momentum in ħk.
    pub fn kinetic_energy_omega_r(p: f64) -> f64 {
        p * p
    }

    /// Rate of change of θ per unit κ⁻¹ time for momentum `p` (ħk): dθ/dt = 2 (ω_R/κ) p.
    pub fn position_rate(p: f64, kappa_over_omega_r: f64) -> f64 {
        2.0 * p / kappa_over_omega_r
    }

    /// Convert an energy from κ units to ω_R units.
    pub fn kappa_to_omega_r(value_kappa: f64, kappa_over_omega_r: f64) -> f64 {
        value_kappa * kappa_over_omega_r
    }
}

/// Spatial structure of the cavity mode set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeFamily {
    /// One standing-wave mode f(θ) = cos θ.
    #[default]
    SingleCosine,
    /// Two counterpropagating running waves f±(θ) = e^{±iθ}.
    RingPair,
    /// M degenerate running-wave members e^{±iθ}, paired into orthogonal sectors.
    DegenerateSet(usize),
}

impl ModeFamily {
    /// Number of modes the family defines.
    pub fn mode_count(&self) -> usize {
        match self {
            ModeFamily::SingleCosine => 1,
            ModeFamily::RingPair => 2,
            ModeFamily::DegenerateSet(m) => *m,
        }
    }
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("n_modes = {given} does not match mode family {family:?} (expects {expected})")]
    ModeCountMismatch {
        given: usize,
        expected: usize,
        family: ModeFamily,
    },
    #[error("{name} must have one entry per mode ({expected}), got {got}")]
    PerModeLength {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("gamma must be non-negative, got {0}")]
    NegativeGamma(f64),
    #[error("per-mode linewidths must be positive, got kappa[{index}] = {value}")]
    NonPositiveKappa { index: usize, value: f64 },
    #[error("reference mode must have kappa[0] = 1 in scaled units, got {0}")]
    ReferenceKappa(f64),
    #[error("trajectories must be at least 1")]
    NoTrajectories,
}

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("degenerate set needs at least one member")]
    EmptySet,
}

/// Full physical and numerical configuration of one simulation scenario.
///
/// All rates are in units of the reference mode linewidth κ and times in κ⁻¹. `u0` is
/// the per-photon light shift, `gamma0` the per-photon scattering rate, `delta` the
/// pump-cavity detunings, `eta` the pump amplitudes. `g_over_kappa` and
/// `gamma_atom_over_omega_r` are only needed for saturation and free-space comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimParams {
    pub n_atoms: usize,
    pub n_modes: usize,
    pub mode_family: ModeFamily,
    pub u0: f64,
    pub gamma0: f64,
    pub delta: Vec<f64>,
    pub kappa: Vec<f64>,
    pub eta: Vec<Complex64>,
    pub g_over_kappa: Option<f64>,
    pub gamma_atom_over_omega_r: Option<f64>,
    pub kappa_over_omega_r: f64,
    pub dt: f64,
    pub t_final: f64,
    pub n_trajectories: usize,
    pub seed: u64,
}

impl SimParams {
    /// Checks structural consistency; returns regime warnings for runs that leave the
    /// model's domain of validity (they are diagnostics, never fatal).
    pub fn validate(&self) -> Result<Vec<String>, ParamError> {
        let expected = self.mode_family.mode_count();
        if self.n_modes != expected {
            return Err(ParamError::ModeCountMismatch {
                given: self.n_modes,
                expected,
                family: self.mode_family,
            });
        }
        for (name, len) in [
            ("delta", self.delta.len()),
            ("kappa", self.kappa.len()),
            ("eta", self.eta.len()),
        ] {
            if len != self.n_modes {
                return Err(ParamError::PerModeLength {
                    name,
                    expected: self.n_modes,
                    got: len,
                });
            }
        }
        for (i, &k) in self.kappa.iter().enumerate() {
            if k <= 0.0 {
                return Err(ParamError::NonPositiveKappa { index: i, value: k });
            }
        }
        if (self.kappa[0] - 1.0).abs() > 1e-12 {
            return Err(ParamError::ReferenceKappa(self.kappa[0]));
        }
        if self.gamma0 < 0.0 {
            return Err(ParamError::NegativeGamma(self.gamma0));
        }
        for (name, value) in [
            ("dt", self.dt),
            ("t_final", self.t_final),
            ("kappa_over_omega_r", self.kappa_over_omega_r),
        ] {
            if value <= 0.0 {
                return Err(ParamError::NonPositive { name, value });
            }
        }
        if self.n_trajectories == 0 {
            return Err(ParamError::NoTrajectories);
        }

        let mut warnings = Vec::new();
        let collective = self.n_atoms as f64 * self.u0.abs();
        if collective > 1.0 {
            warnings.push(format!(
                "collective light shift N|U0| = {collective:.3} exceeds kappa; \
                 the weak-coupling regime assumed by the analytic estimates is left"
            ));
        }
        if (self.delta[0] + 1.0).abs() > 1.0 {
            warnings.push(format!(
                "detuning delta = {:.3} kappa is far from the optimal-cooling \
                 neighbourhood of -kappa",
                self.delta[0]
            ));
        }
        if let Some(g) = self.g_over_kappa {
            let s = self.eta[0].norm_sqr() * self.u0 * self.u0 / (4.0 * g * g);
            if s >= 1.0 {
                warnings.push(format!(
                    "estimated saturation s = {s:.3} >= 1: model validity violated"
                ));
            }
        }
        Ok(warnings)
    }
}

/// Spatial profile of a single cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeShape {
    /// f(θ) = cos θ.
    Cosine,
    /// f(θ) = e^{i·sign·θ} with sign = ±1.
    Running { sign: i8 },
}

/// One member of a mode basis; `sector` is the transverse-profile label that makes
/// members with identical longitudinal shape orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeMember {
    pub shape: ModeShape,
    pub sector: u32,
}

/// Evaluable set of mode functions on the unit period θ ∈ [0, 2π).
#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub family: ModeFamily,
    members: Vec<ModeMember>,
}

/// Builds the mode basis for a family.
pub fn build_mode_basis(family: ModeFamily) -> Result<ModeBasis, BasisError> {
    let members = match family {
        ModeFamily::SingleCosine => vec![ModeMember {
            shape: ModeShape::Cosine,
            sector: 0,
        }],
        ModeFamily::RingPair => vec![
            ModeMember {
                shape: ModeShape::Running { sign: 1 },
                sector: 0,
            },
            ModeMember {
                shape: ModeShape::Running { sign: -1 },
                sector: 0,
            },
        ],
        ModeFamily::DegenerateSet(m) => {
            if m == 0 {
                return Err(BasisError::EmptySet);
            }
            (0..m)
                .map(|j| ModeMember {
                    shape: ModeShape::Running {
                        sign: if j % 2 == 0 { 1 } else { -1 },
                    },
                    sector: (j / 2) as u32,
                })
                .collect()
        }
    };
    Ok(ModeBasis { family, members })
}

impl ModeBasis {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ModeMember] {
        &self.members
    }

    /// Mode function f_k(θ).
    pub fn eval(&self, k: usize, theta: f64) -> Complex64 {
        let (s, c) = theta.sin_cos();
        match self.members[k].shape {
            ModeShape::Cosine => Complex64::new(c, 0.0),
            ModeShape::Running { sign } => Complex64::new(c, sign as f64 * s),
        }
    }

    /// Spatial derivative f_k'(θ).
    pub fn gradient(&self, k: usize, theta: f64) -> Complex64 {
        let (s, c) = theta.sin_cos();
        match self.members[k].shape {
            ModeShape::Cosine => Complex64::new(-s, 0.0),
            ModeShape::Running { sign } => {
                let sg = sign as f64;
                Complex64::new(-s, sg * c)
            }
        }
    }

    /// Period average ⟨|f_k|²⟩ (1/2 for cosine members, 1 for running waves).
    pub fn mean_square(&self, k: usize) -> f64 {
        match self.members[k].shape {
            ModeShape::Cosine => 0.5,
            ModeShape::Running { .. } => 1.0,
        }
    }

    /// Inner product (1/2π)∫ f_j f_k* dθ times the transverse-sector overlap.
    pub fn inner_product(&self, j: usize, k: usize) -> Complex64 {
        if self.members[j].sector != self.members[k].sector {
            return Complex64::new(0.0, 0.0);
        }
        const POINTS: usize = 512;
        let h = std::f64::consts::TAU / POINTS as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..POINTS {
            let theta = (i as f64 + 0.5) * h;
            acc += self.eval(j, theta) * self.eval(k, theta).conj();
        }
        acc / POINTS as f64
    }

    /// Field E(θ) = Σ_k f_k(θ) α_k and its gradient, evaluated in one pass.
    pub fn field_and_gradient(&self, alpha: &[Complex64], theta: f64) -> (Complex64, Complex64) {
        let (s, c) = theta.sin_cos();
        let mut e = Complex64::new(0.0, 0.0);
        let mut de = Complex64::new(0.0, 0.0);
        for (member, a) in self.members.iter().zip(alpha) {
            match member.shape {
                ModeShape::Cosine => {
                    e += a * c;
                    de -= a * s;
                }
                ModeShape::Running { sign } => {
                    let sg = sign as f64;
                    let f = Complex64::new(c, sg * s);
                    e += a * f;
                    de += a * f * Complex64::new(0.0, sg);
                }
            }
        }
        (e, de)
    }
}

/// Instantaneous phase-space state: atom positions θ (unwrapped), momenta p (ħk),
/// complex mode amplitudes α, and elapsed time t (κ⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub t: f64,
}

impl SystemState {
    pub fn new(theta: Vec<f64>, p: Vec<f64>, alpha: Vec<Complex64>) -> Self {
        assert_eq!(theta.len(), p.len(), "one momentum per atom");
        SystemState {
            theta,
            p,
            alpha,
            t: 0.0,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.theta.len()
    }

    pub fn n_modes(&self) -> usize {
        self.alpha.len()
    }
}

/// Total field amplitude E(θ_n) = Σ_k f_k(θ_n) α_k seen by atom n.
pub fn field_amplitude(state: &SystemState, basis: &ModeBasis, n: usize) -> Complex64 {
    basis.field_and_gradient(&state.alpha, state.theta[n]).0
}

/// Field gradient ∇E(θ_n) = Σ_k f_k'(θ_n) α_k at atom n.
pub fn field_gradient(state: &SystemState, basis: &ModeBasis, n: usize) -> Complex64 {
    basis.field_and_gradient(&state.alpha, state.theta[n]).1
}
