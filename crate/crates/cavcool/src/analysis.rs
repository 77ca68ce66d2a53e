//! Curve fitting and brute-force checks: exponential cooling fits of ensemble
//! series, a dragged-atom friction scan that measures the velocity-dependent force
//! directly from the field dynamics, and a pinned-atom estimator of the effective
//! momentum diffusion.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{dipole_from_field, radiation_pressure_from_field};
use crate::integrator::{step, EnsembleSeries, StepWorkspace};
use crate::model::{ModeBasis, SimParams, SystemState};
use crate::noise::trajectory_rng;

/// Result of fitting E(t) = E_∞ + (E₀ − E_∞)·exp(−t/τ) to a kinetic-energy series.
/// The plateau E_∞ equals half the equilibrium temperature, so k_BT = 2·E_∞.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    /// Fitted initial kinetic energy per atom, ω_R units.
    pub e0: f64,
    /// Fitted plateau (equilibrium kinetic energy per atom), ω_R units.
    pub plateau: f64,
    /// Equilibrium temperature 2·E_∞ in ω_R units.
    pub k_b_t_omega_r: f64,
    /// The same temperature expressed in κ units.
    pub k_b_t_kappa: f64,
    /// Cooling time constant in κ⁻¹.
    pub tau_c: f64,
    /// One-sigma uncertainty of tau_c from the fit covariance.
    pub tau_c_stderr: f64,
    /// One-sigma uncertainty of k_b_t_omega_r.
    pub k_b_t_stderr_omega_r: f64,
    /// Unweighted root-mean-square residual, ω_R units.
    pub residual_rms: f64,
    pub n_points: usize,
    pub iterations: usize,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 10 samples to fit, got {0}")]
    TooFewSamples(usize),
    #[error("no cooling detected: first sample does not exceed the last beyond noise")]
    NoCoolingDetected,
    #[error("fit did not converge within {0} iterations")]
    NotConverged(usize),
    #[error("fit produced an unusable model (non-finite or non-positive time constant)")]
    Degenerate,
}

const MAX_FIT_ITERATIONS: usize = 200;
const FIT_RELATIVE_TOLERANCE: f64 = 1e-8;

/// Fits the three-parameter exponential cooling law to an ensemble series,
/// weighting samples by their inverse variance where standard errors are available.
pub fn fit_exponential(series: &EnsembleSeries) -> Result<FitResult, FitError> {
    fit_series(
        &series.t,
        &series.e_kin_mean,
        &series.e_kin_sem,
        series.kappa_over_omega_r,
    )
}

/// Same fit on raw arrays; `sem` may contain zeros, in which case the fit falls back
/// to uniform weights.
// negated comparisons are deliberate: a NaN anywhere must fail, not pass
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn fit_series(
    t: &[f64],
    e: &[f64],
    sem: &[f64],
    kappa_over_omega_r: f64,
) -> Result<FitResult, FitError> {
    let n = t.len();
    if n < 10 || e.len() != n {
        return Err(FitError::TooFewSamples(n.min(e.len())));
    }
    let first = e[0];
    let last = e[n - 1];
    let noise_floor = if sem.len() == n {
        2.0 * sem[0].hypot(sem[n - 1])
    } else {
        0.0
    };
    if !(first > last + noise_floor) {
        return Err(FitError::NoCoolingDetected);
    }

    let weights: Vec<f64> = if sem.len() == n && sem.iter().all(|s| *s > 0.0) {
        sem.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; n]
    };

    // Initial guesses: plateau from the tail, amplitude from the first sample, and
    // the 1/e crossing time of the excess energy.
    let tail_start = n - (n / 10).max(1);
    let plateau0 = e[tail_start..].iter().sum::<f64>() / (n - tail_start) as f64;
    let e00 = first;
    let target = plateau0 + (e00 - plateau0) / std::f64::consts::E;
    let tau0 = t
        .iter()
        .zip(e.iter())
        .find(|(_, y)| **y <= target)
        .map(|(ti, _)| *ti)
        .filter(|ti| *ti > 0.0)
        .unwrap_or(t[n - 1] / 3.0);

    let model = |p: &Vector3<f64>, ti: f64| p[1] + (p[0] - p[1]) * (-ti / p[2]).exp();
    let cost = |p: &Vector3<f64>| -> f64 {
        t.iter()
            .zip(e.iter())
            .zip(weights.iter())
            .map(|((ti, yi), wi)| {
                let r = model(p, *ti) - yi;
                wi * r * r
            })
            .sum()
    };

    let mut p = Vector3::new(e00, plateau0, tau0);
    let mut lambda = 1e-3;
    let mut current_cost = cost(&p);
    let mut iterations = 0;
    let mut converged = false;
    let mut hessian = Matrix3::<f64>::zeros();

    while iterations < MAX_FIT_ITERATIONS && !converged {
        iterations += 1;
        let mut h = Matrix3::<f64>::zeros();
        let mut g = Vector3::<f64>::zeros();
        for ((ti, yi), wi) in t.iter().zip(e.iter()).zip(weights.iter()) {
            let decay = (-ti / p[2]).exp();
            let r = p[1] + (p[0] - p[1]) * decay - yi;
            let j = Vector3::new(decay, 1.0 - decay, (p[0] - p[1]) * ti / (p[2] * p[2]) * decay);
            h += *wi * j * j.transpose();
            g += *wi * r * j;
        }
        hessian = h;

        let mut accepted = false;
        while lambda < 1e12 {
            let mut damped = h;
            for i in 0..3 {
                damped[(i, i)] += lambda * h[(i, i)].max(1e-30);
            }
            let Some(delta) = damped.lu().solve(&(-g)) else {
                lambda *= 10.0;
                continue;
            };
            let candidate = p + delta;
            if candidate[2] <= 0.0 || !candidate.iter().all(|x| x.is_finite()) {
                lambda *= 10.0;
                continue;
            }
            let candidate_cost = cost(&candidate);
            if candidate_cost <= current_cost {
                let rel_step = (0..3)
                    .map(|i| (delta[i] / (p[i].abs() + 1e-300)).abs())
                    .fold(0.0, f64::max);
                p = candidate;
                current_cost = candidate_cost;
                lambda = (lambda * 0.3).max(1e-12);
                accepted = true;
                if rel_step < FIT_RELATIVE_TOLERANCE {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // The damping search exhausted itself: we are at a (local) minimum.
            converged = true;
        }
    }
    if !converged {
        return Err(FitError::NotConverged(MAX_FIT_ITERATIONS));
    }
    if !(p[2] > 0.0) || !p.iter().all(|x| x.is_finite()) {
        return Err(FitError::Degenerate);
    }

    let dof = (n as f64 - 3.0).max(1.0);
    let s2 = current_cost / dof;
    let covariance = hessian.try_inverse();
    let (tau_stderr, plateau_stderr) = covariance
        .map(|c| ((c[(2, 2)] * s2).max(0.0).sqrt(), (c[(1, 1)] * s2).max(0.0).sqrt()))
        .unwrap_or((f64::NAN, f64::NAN));
    let rms = (t
        .iter()
        .zip(e.iter())
        .map(|(ti, yi)| {
            let r = model(&p, *ti) - yi;
            r * r
        })
        .sum::<f64>()
        / n as f64)
        .sqrt();

    Ok(FitResult {
        e0: p[0],
        plateau: p[1],
        k_b_t_omega_r: 2.0 * p[1],
        k_b_t_kappa: 2.0 * p[1] / kappa_over_omega_r,
        tau_c: p[2],
        tau_c_stderr: tau_stderr,
        k_b_t_stderr_omega_r: 2.0 * plateau_stderr,
        residual_rms: rms,
        n_points: n,
        iterations,
    })
}

/// Linear friction coefficient at position θ for a single standing-wave mode,
/// F₁(θ) = −2 cos²θ sin²θ · η²U0²/κ⁴ (force per unit velocity, code units).
pub fn local_friction(params: &SimParams, theta: f64) -> f64 {
    let eta = params.eta[0].norm();
    let kappa = params.kappa[0];
    let (s, c) = theta.sin_cos();
    -2.0 * c * c * s * s * eta * eta * params.u0 * params.u0 / kappa.powi(4)
}

#[derive(Debug, Clone, Serialize)]
pub struct FrictionScanPoint {
    /// Drag velocity dθ/dt in κ units.
    pub velocity: f64,
    /// Force on the atom averaged over one spatial period, ħk per κ⁻¹.
    pub mean_force: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrictionScan {
    pub points: Vec<FrictionScanPoint>,
    /// Slope of force vs velocity: the measured position-averaged friction.
    pub f1_slope: f64,
    /// Intercept of the regression; ≈ 0 after full-period averaging.
    pub f0_intercept: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("friction scan needs at least two distinct velocities")]
    GridTooSmall,
    #[error("field transient did not settle at velocity {velocity}: period drift {drift:e}")]
    FieldNotConverged { velocity: f64, drift: f64 },
}

const SCAN_TRANSIENT: f64 = 30.0;
const SCAN_DRIFT_TOLERANCE: f64 = 1e-6;
const SCAN_MAX_PERIODS: usize = 24;

/// Steady cavity field for a single atom held at position θ: solves the linear
/// stationary field equations exactly.
pub fn static_field(params: &SimParams, basis: &ModeBasis, theta: f64) -> Vec<Complex64> {
    let m = basis.len();
    let f: Vec<Complex64> = (0..m).map(|k| basis.eval(k, theta)).collect();
    let coupling = Complex64::new(params.gamma0, params.u0);
    let a = DMatrix::<Complex64>::from_fn(m, m, |k, j| {
        let diagonal = if k == j {
            Complex64::new(-params.kappa[k], params.delta[k])
        } else {
            Complex64::new(0.0, 0.0)
        };
        diagonal - coupling * f[k].conj() * f[j]
    });
    let rhs = DVector::<Complex64>::from_fn(m, |k, _| params.eta[k].conj());
    a.lu()
        .solve(&rhs)
        .map(|x| x.iter().cloned().collect())
        .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); m])
}

fn force_at(params: &SimParams, basis: &ModeBasis, alpha: &[Complex64], theta: f64) -> f64 {
    let (e, de) = basis.field_and_gradient(alpha, theta);
    dipole_from_field(params.u0, e, de) + radiation_pressure_from_field(params.gamma0, e, de)
}

/// Field equation right-hand side for one atom pinned at θ (its back-action
/// included, its motion prescribed externally).
fn dragged_field_rhs(
    params: &SimParams,
    basis: &ModeBasis,
    alpha: &[Complex64],
    theta: f64,
    out: &mut [Complex64],
) {
    let (e, _) = basis.field_and_gradient(alpha, theta);
    for k in 0..alpha.len() {
        let s = e * basis.eval(k, theta).conj();
        out[k] = -params.eta[k].conj()
            + Complex64::new(0.0, 1.0) * (params.delta[k] * alpha[k] - params.u0 * s)
            - (params.kappa[k] * alpha[k] + params.gamma0 * s);
    }
}

/// Classic fourth-order Runge-Kutta update of the dragged field over one step.
fn rk4_field_step(
    params: &SimParams,
    basis: &ModeBasis,
    alpha: &mut [Complex64],
    theta: f64,
    v: f64,
    dt: f64,
    scratch: &mut [Vec<Complex64>; 5],
) {
    let m = alpha.len();
    let [k1, k2, k3, k4, tmp] = scratch;
    dragged_field_rhs(params, basis, alpha, theta, k1);
    for k in 0..m {
        tmp[k] = alpha[k] + 0.5 * dt * k1[k];
    }
    dragged_field_rhs(params, basis, tmp, theta + 0.5 * v * dt, k2);
    for k in 0..m {
        tmp[k] = alpha[k] + 0.5 * dt * k2[k];
    }
    dragged_field_rhs(params, basis, tmp, theta + 0.5 * v * dt, k3);
    for k in 0..m {
        tmp[k] = alpha[k] + dt * k3[k];
    }
    dragged_field_rhs(params, basis, tmp, theta + v * dt, k4);
    for k in 0..m {
        alpha[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
}

fn period_averaged_force(
    params: &SimParams,
    basis: &ModeBasis,
    v: f64,
) -> Result<f64, ScanError> {
    // The force pattern repeats every π in θ; integrate the field through the
    // transient, then average over successive periods until the average settles.
    let period_theta = std::f64::consts::PI;
    let period_time = period_theta / v.abs();
    let steps_per_period = ((period_time / 2e-3).ceil() as usize).max(64);
    let dt = period_time / steps_per_period as f64;

    let mut theta = 0.3;
    let mut alpha = static_field(params, basis, theta);
    let mut scratch: [Vec<Complex64>; 5] =
        std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); alpha.len()]);

    let transient_steps = (SCAN_TRANSIENT / dt).ceil() as usize;
    for _ in 0..transient_steps {
        rk4_field_step(params, basis, &mut alpha, theta, v, dt, &mut scratch);
        theta += v * dt;
    }

    let mut previous: Option<f64> = None;
    let mut last_drift = f64::INFINITY;
    for _period in 0..SCAN_MAX_PERIODS {
        let mut sum = 0.0;
        let mut f_left = force_at(params, basis, &alpha, theta);
        for _ in 0..steps_per_period {
            rk4_field_step(params, basis, &mut alpha, theta, v, dt, &mut scratch);
            theta += v * dt;
            let f_right = force_at(params, basis, &alpha, theta);
            sum += 0.5 * (f_left + f_right);
            f_left = f_right;
        }
        let average = sum / steps_per_period as f64;
        if let Some(prev) = previous {
            last_drift = (average - prev).abs();
            if last_drift <= SCAN_DRIFT_TOLERANCE {
                return Ok(average);
            }
        }
        previous = Some(average);
    }
    Err(ScanError::FieldNotConverged {
        velocity: v,
        drift: last_drift,
    })
}

/// Spatial average of the static force on a held atom; vanishes by symmetry and
/// serves as the v = 0 entry of the scan.
fn static_force_average(params: &SimParams, basis: &ModeBasis) -> f64 {
    let n_q = 512;
    let mut sum = 0.0;
    for i in 0..n_q {
        let theta = (i as f64 + 0.5) * std::f64::consts::TAU / n_q as f64;
        let alpha = static_field(params, basis, theta);
        sum += force_at(params, basis, &alpha, theta);
    }
    sum / n_q as f64
}

/// Drags one atom across the lattice at each velocity of the grid, with its
/// back-action on the field fully retained, and regresses the period-averaged force
/// against velocity. The slope is a direct, fit-free measurement of the friction.
pub fn friction_scan(
    params: &SimParams,
    basis: &ModeBasis,
    v_grid: &[f64],
) -> Result<FrictionScan, ScanError> {
    let mut distinct = v_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(ScanError::GridTooSmall);
    }

    let mut warnings = Vec::new();
    let mut points = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        if v.abs() >= params.kappa[0] {
            warnings.push(format!(
                "velocity {v} is outside the linear-response regime (|v| ≥ κ)"
            ));
        }
        let mean_force = if v == 0.0 {
            static_force_average(params, basis)
        } else {
            period_averaged_force(params, basis, v)?
        };
        points.push(FrictionScanPoint {
            velocity: v,
            mean_force,
        });
    }

    let n = points.len() as f64;
    let mean_v = points.iter().map(|p| p.velocity).sum::<f64>() / n;
    let mean_f = points.iter().map(|p| p.mean_force).sum::<f64>() / n;
    let sxx: f64 = points
        .iter()
        .map(|p| (p.velocity - mean_v).powi(2))
        .sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.velocity - mean_v) * (p.mean_force - mean_f))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_f - slope * mean_v;

    Ok(FrictionScan {
        points,
        f1_slope: slope,
        f0_intercept: intercept,
        warnings,
    })
}

/// Estimates the effective momentum diffusion at position θ by holding an atom
/// there, integrating the stochastic field around it, and measuring the growth of
/// the momentum variance: D = Var[p(T)] / (2T). Captures both direct recoil and the
/// force fluctuations mediated by the noisy field.
pub fn effective_momentum_diffusion(
    params: &SimParams,
    basis: &ModeBasis,
    theta: f64,
    n_paths: usize,
    t_total: f64,
) -> f64 {
    // Freeze the position by making it insensitive to momentum; the momentum then
    // simply accumulates the fluctuating force.
    let mut pinned = params.clone();
    pinned.kappa_over_omega_r = 1e300;
    let alpha0 = static_field(&pinned, basis, theta);
    let n_steps = (t_total / pinned.dt).round() as usize;

    let mut finals = Vec::with_capacity(n_paths);
    let mut ws = StepWorkspace::new();
    for path in 0..n_paths {
        let mut rng = trajectory_rng(pinned.seed, path as u64);
        let mut state = SystemState::new(vec![theta], vec![0.0], alpha0.clone());
        for _ in 0..n_steps {
            step(&mut state, basis, &pinned, pinned.dt, &mut rng, &mut ws);
        }
        finals.push(state.p[0]);
    }
    let n = finals.len() as f64;
    let mean = finals.iter().sum::<f64>() / n;
    let var = finals.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
    var / (2.0 * t_total)
}
