//! End-to-end acceptance gate. Each numbered criterion is one test that prints a
//! single `criterion N: PASS/FAIL` verdict (written through the raw stdout handle
//! so the lines stay visible under the default harness capture; run with
//! `--test-threads 1` for ordered output). Criteria 2, 4, 5, 7 and 9 integrate
//! real stochastic ensembles and take a few minutes in total on one core.
//! Criterion 3 repeats the cooling benchmark at N = 10 and is ignored by default
//! (roughly 25 minutes single-core); include it with
//! `cargo test --test acceptance -- --ignored`.

use std::io::Write as _;
use std::process::{Command, Stdio};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use cavcool::analysis::{fit_exponential, friction_scan, local_friction};
use cavcool::cli::presets::{build, PresetName};
use cavcool::dynamics::empty_cavity_steady_state;
use cavcool::integrator::{
    run_ensemble, step_deterministic, EnsembleSeries, RunOptions, StepWorkspace,
};
use cavcool::model::{build_mode_basis, ModeFamily, SimParams, SystemState};
use cavcool::noise::{
    diffusion_matrix, induced_increments, momentum_index, quadrature_im_index,
    quadrature_re_index, spontaneous_increments, trajectory_rng,
};
use cavcool::predictor::{predict_single_atom, ring_multimode_predictions};

/// Runs one criterion body and prints its verdict line. `Ok(detail)` passes,
/// `Err(detail)` prints FAIL and panics with the same detail.
fn check(number: u32, body: impl FnOnce() -> Result<String, String>) {
    let verdict = body();
    let line = match &verdict {
        Ok(detail) => format!("criterion {number}: PASS — {detail}"),
        Err(detail) => format!("criterion {number}: FAIL — {detail}"),
    };
    let mut out = std::io::stdout();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    if let Err(detail) = verdict {
        panic!("criterion {number}: {detail}");
    }
}

/// Neutral single-mode parameter set; each criterion overrides what it pins.
fn params_template() -> SimParams {
    SimParams {
        n_atoms: 1,
        n_modes: 1,
        mode_family: ModeFamily::SingleCosine,
        u0: -0.1,
        gamma0: 0.0,
        delta: vec![-1.0],
        kappa: vec![1.0],
        eta: vec![Complex64::new(1.0, 0.0)],
        g_over_kappa: None,
        gamma_atom_over_omega_r: None,
        kappa_over_omega_r: 415.0,
        dt: 1e-3,
        t_final: 1.0,
        n_trajectories: 1,
        seed: 0,
    }
}

fn cavcool_command() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cavcool"));
    // keep the ambient environment from leaking a seed into pinned runs
    cmd.env_remove("CAVCOOL_SEED");
    cmd
}

#[test]
fn criterion_01_empty_cavity_steady_state() {
    check(1, || {
        let cases = [(2.1, -0.7, 1.0), (0.8, -1.3, 1.0), (3.0, -1.0, 0.6)];
        let mut worst: f64 = 0.0;
        for &(eta, delta, kappa) in &cases {
            let mut params = params_template();
            params.u0 = 0.0; // decouple the atom: pure driven-damped mode
            params.eta = vec![Complex64::new(eta, 0.0)];
            params.delta = vec![delta];
            params.kappa = vec![kappa];
            let basis = build_mode_basis(params.mode_family).map_err(|e| e.to_string())?;
            let mut state =
                SystemState::new(vec![0.4], vec![0.0], vec![Complex64::new(0.0, 0.0)]);
            let mut ws = StepWorkspace::new();
            let dt = 1e-3;
            // the forward-Euler iteration has the exact fixed point α = η/(κ−iΔ),
            // and 60 κ⁻¹ decays the transient far below the tolerance
            for _ in 0..60_000 {
                step_deterministic(&mut state, &basis, &params, dt, &mut ws);
            }
            let target = eta * eta / (kappa * kappa + delta * delta);
            let integrated = state.alpha[0].norm_sqr();
            let closed =
                empty_cavity_steady_state(Complex64::new(eta, 0.0), kappa, delta).norm_sqr();
            worst = worst
                .max((integrated / target - 1.0).abs())
                .max((closed / target - 1.0).abs());
        }
        let detail = format!(
            "driven-mode fixed point matches η²/(κ²+Δ²); worst relative error {worst:.2e} (tolerance 1e-10)"
        );
        if worst < 1e-10 {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

#[test]
fn criterion_02_strong_drive_cooling_benchmark() {
    check(2, || {
        let config = build(PresetName::Fig1, Some(1));
        let (params, options) = config.to_sim_params(1).map_err(|e| e.to_string())?;
        let series = run_ensemble(&params, &options).map_err(|e| e.to_string())?;
        let fit = fit_exponential(&series).map_err(|e| e.to_string())?;
        // reference values for this scenario: τ_c = 142 κ⁻¹ ± 30%, plateau 466 ω_R ± 25%
        let tau_ok = (99.4..=184.6).contains(&fit.tau_c);
        let plateau_ok = (349.5..=582.5).contains(&fit.plateau);
        let detail = format!(
            "τ_c = {:.1} κ⁻¹ (reference 142 ± 30%), steady-state E_kin = {:.0} ω_R (reference 466 ± 25%)",
            fit.tau_c, fit.plateau
        );
        if tau_ok && plateau_ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

#[test]
#[ignore = "slow: ~13 min single-core; run with `cargo test --test acceptance -- --ignored`"]
fn criterion_03_ten_atom_cooling_benchmark() {
    check(3, || {
        // scaling rule built into the preset: U0 ∝ 1/N, η ∝ √N, γ ∝ 1/N², span ∝ N
        let mut config = build(PresetName::Fig1, Some(10));
        // The decay is exponential only while the ensemble stays spatially
        // mobile: as atoms localize in the deep wells the friction dies off and
        // the cooling stalls, so longer spans drag the fitted time constant
        // upward. The fit therefore covers the initial stage, ≈3.3 expected time
        // constants — enough to pin the plateau, short enough to stay in the
        // mobile regime.
        config.t_final = 4000.0;
        let (params, options) = config.to_sim_params(1).map_err(|e| e.to_string())?;
        let series = run_ensemble(&params, &options).map_err(|e| e.to_string())?;
        let fit = fit_exponential(&series).map_err(|e| e.to_string())?;
        // reference cooling time 1110 κ⁻¹ ± 30%
        let tau_ok = (777.0..=1443.0).contains(&fit.tau_c);
        let detail = format!("τ_c = {:.0} κ⁻¹ at N = 10 (reference 1110 ± 30%)", fit.tau_c);
        if tau_ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

/// Ordinary least squares y = slope·x + intercept, returning (slope, intercept,
/// R², standard error of the intercept).
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - slope * xi - intercept).powi(2))
        .sum();
    let ss_tot: f64 = y.iter().map(|yi| (yi - my).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    let sigma_sq = ss_res / (n - 2.0);
    let intercept_se = (sigma_sq * (1.0 / n + mx * mx / sxx)).sqrt();
    (slope, intercept, r2, intercept_se)
}

#[test]
fn criterion_04_cooling_time_grows_linearly_with_atom_number() {
    check(4, || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let status = cavcool_command()
            .args([
                "scan-n", "--preset", "fig2", "--n", "1,2,4,8", "--trajectories", "32",
                "--dt", "0.002", "--t-final", "400", "--seed", "2", "--formats", "csv",
                "--out",
            ])
            .arg(dir.path())
            .stderr(Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("scan-n exited with {status}"));
        }
        let text = std::fs::read_to_string(dir.path().join("scaling.csv"))
            .map_err(|e| e.to_string())?;
        let mut ns = Vec::new();
        let mut taus = Vec::new();
        for line in text.lines().skip(1) {
            let mut fields = line.split(',');
            let n = fields.next().ok_or("scaling.csv: missing n column")?;
            let tau = fields.next().ok_or("scaling.csv: missing tau_c column")?;
            ns.push(n.parse::<f64>().map_err(|e| e.to_string())?);
            taus.push(tau.parse::<f64>().map_err(|e| e.to_string())?);
        }
        if ns.len() != 4 {
            return Err(format!("expected 4 scan points, found {}", ns.len()));
        }
        let (slope, intercept, r2, intercept_se) = line_fit(&ns, &taus);
        let detail = format!(
            "τ_c vs N: slope {slope:.1} κ⁻¹ per atom, R² = {r2:.3} (> 0.9), intercept {intercept:.1} ± {intercept_se:.1} (zero within 2σ)"
        );
        if r2 > 0.9 && intercept.abs() <= 2.0 * intercept_se {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

/// Temperature from the equilibrated tail of a series: k_BT = 2·⟨E_kin⟩ over the
/// final quarter of the samples.
fn tail_temperature(series: &EnsembleSeries) -> f64 {
    let n = series.e_kin_mean.len();
    let tail = &series.e_kin_mean[n - n / 4..];
    2.0 * tail.iter().sum::<f64>() / tail.len() as f64
}

#[test]
fn criterion_05_temperature_plateau_and_runaway_detection() {
    check(5, || {
        // weak-shift regime: the plateau temperature must not depend on how many
        // atoms share the cavity while N|U0| stays well below κ
        let mut temps = Vec::new();
        for &n in &[1usize, 5, 10] {
            let mut params = params_template();
            params.n_atoms = n;
            params.u0 = -0.05;
            params.gamma0 = 2.5e-4;
            params.eta = vec![Complex64::new(10.0, 0.0)];
            params.dt = 2e-3;
            params.t_final = 2500.0;
            params.n_trajectories = 24;
            params.seed = 11;
            let options = RunOptions {
                stride: 200,
                with_noise: true,
                e_kin_init: 200.0,
            };
            let series = run_ensemble(&params, &options).map_err(|e| e.to_string())?;
            temps.push(tail_temperature(&series));
        }
        let t_max = temps.iter().cloned().fold(f64::MIN, f64::max);
        let t_min = temps.iter().cloned().fold(f64::MAX, f64::min);
        let spread_ok = t_max / t_min < 2.0;

        // blue-shifted effective detuning (N|U0| = 5κ drags Δ_eff positive once the
        // atoms localize): the run must finish in the no-cooling or divergence
        // outcome with strongly grown kinetic energy
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let status = cavcool_command()
            .args([
                "run", "--n-atoms", "10", "--u0", "-0.5", "--gamma", "0.001", "--delta",
                "-1", "--eta", "10", "--kappa-over-omega-r", "415", "--dt", "0.002",
                "--t-final", "150", "--trajectories", "8", "--seed", "3", "--formats",
                "csv", "--out",
            ])
            .arg(dir.path())
            .stderr(Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        let code = status.code().unwrap_or(-1);
        let text = std::fs::read_to_string(dir.path().join("series.csv"))
            .map_err(|e| e.to_string())?;
        let energies: Vec<f64> = text
            .lines()
            .skip(1)
            .filter_map(|line| line.split(',').nth(1))
            .map(|v| v.parse::<f64>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let (first, last) = match (energies.first(), energies.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err("series.csv contained no samples".into()),
        };
        let runaway_ok = (code == 2 || code == 3) && last >= 10.0 * first;

        let detail = format!(
            "k_BT(N=1,5,10) = {:.0}/{:.0}/{:.0} ω_R (max/min = {:.2}, limit 2); runaway run exited {code} with E {:.0} → {:.0} ω_R",
            temps[0], temps[1], temps[2], t_max / t_min, first, last
        );
        if spread_ok && runaway_ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

#[test]
fn criterion_06_drag_measured_friction_matches_linear_response() {
    check(6, || {
        let mut params = params_template();
        params.u0 = -0.01;
        params.eta = vec![Complex64::new(3.0, 0.0)];
        let basis = build_mode_basis(params.mode_family).map_err(|e| e.to_string())?;
        let scan = friction_scan(&params, &basis, &[0.0, 0.01, 0.02, 0.03, 0.05])
            .map_err(|e| e.to_string())?;
        // linear-response slope −η²U0²/(4κ⁴) at Δ = −κ: η = 3, U0 = −0.01 → −2.25e-4
        let expected = -2.25e-4;
        let rel = (scan.f1_slope / expected - 1.0).abs();
        let slope_ok = rel < 0.10;

        let antinode = local_friction(&params, 0.0);
        let node = local_friction(&params, std::f64::consts::FRAC_PI_2).abs();
        // θ = 0 is exactly representable; π/2 is not, so the node value is zero up
        // to the rounding of π/2 itself (cos(π/2) ≈ 6e-17 squared)
        let zeros_ok = antinode == 0.0 && node < 1e-30;

        let detail = format!(
            "dragged-atom slope {:.3e} vs linear response {expected:.3e} (off {:.1}%, limit 10%); friction at antinode {antinode:e}, at node {node:.1e}",
            scan.f1_slope,
            100.0 * rel
        );
        if slope_ok && zeros_ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

#[test]
fn criterion_07_noise_increments_realize_the_diffusion_matrix() {
    check(7, || {
        let mut params = params_template();
        params.n_atoms = 2;
        params.n_modes = 2;
        params.mode_family = ModeFamily::RingPair;
        params.u0 = -0.3;
        params.gamma0 = 0.02;
        params.delta = vec![-0.8, -1.1];
        params.kappa = vec![1.0, 1.3];
        params.eta = vec![Complex64::new(1.2, 0.0), Complex64::new(0.9, 0.0)];
        let basis = build_mode_basis(params.mode_family).map_err(|e| e.to_string())?;
        let n_atoms = params.n_atoms;
        let n_modes = basis.len();
        let dim = n_atoms + 2 * n_modes;
        let dt = 1e-3;
        let draws = 100_000usize;

        let mut worst_sigma: f64 = 0.0;
        let mut min_eig = f64::MAX;
        for state_index in 0..20u64 {
            let mut rng = trajectory_rng(0x0acce557, state_index);
            let theta: Vec<f64> = (0..n_atoms)
                .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
                .collect();
            let p: Vec<f64> = (0..n_atoms)
                .map(|_| 5.0 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let alpha: Vec<Complex64> = (0..n_modes)
                .map(|_| {
                    Complex64::new(
                        2.0 * rng.sample::<f64, _>(StandardNormal),
                        2.0 * rng.sample::<f64, _>(StandardNormal),
                    )
                })
                .collect();
            let state = SystemState::new(theta, p, alpha);
            let d = diffusion_matrix(&state, &basis, &params);

            let eig = nalgebra::SymmetricEigen::new(d.clone());
            min_eig = min_eig.min(eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min));

            // second moments of the summed increments over `draws` samples
            let mut second = DMatrix::<f64>::zeros(dim, dim);
            let mut v = vec![0.0; dim];
            for _ in 0..draws {
                let mut inc = spontaneous_increments(&state, &basis, &params, dt, &mut rng);
                let induced = induced_increments(&state, &basis, &params, dt, &mut rng);
                for (a, b) in inc.dp.iter_mut().zip(&induced.dp) {
                    *a += b;
                }
                for (a, b) in inc.dalpha.iter_mut().zip(&induced.dalpha) {
                    *a += b;
                }
                for n in 0..n_atoms {
                    v[momentum_index(n)] = inc.dp[n];
                }
                for k in 0..n_modes {
                    v[quadrature_re_index(n_atoms, k)] = inc.dalpha[k].re;
                    v[quadrature_im_index(n_atoms, n_modes, k)] = inc.dalpha[k].im;
                }
                for i in 0..dim {
                    for j in 0..=i {
                        second[(i, j)] += v[i] * v[j];
                    }
                }
            }

            // Gaussian increments: SE of a sampled covariance entry is
            // √((D_ii·D_jj + D_ij²)/K)
            for i in 0..dim {
                for j in 0..=i {
                    let measured = second[(i, j)] / (draws as f64 * dt);
                    let se =
                        ((d[(i, i)] * d[(j, j)] + d[(i, j)] * d[(i, j)]) / draws as f64).sqrt();
                    let sigmas = (measured - d[(i, j)]).abs() / (se + 1e-15);
                    worst_sigma = worst_sigma.max(sigmas);
                }
            }
        }

        let cov_ok = worst_sigma <= 5.0;
        let psd_ok = min_eig >= -1e-12;
        let detail = format!(
            "sampled covariance within {worst_sigma:.2} SE of the diffusion matrix (limit 5) over 20 states × 1e5 draws; min eigenvalue {min_eig:.2e} (≥ −1e-12)"
        );
        if cov_ok && psd_ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

#[test]
fn criterion_08_closed_form_identities() {
    check(8, || {
        // (U0, η, g/κ, Γ/ω_R, κ/ω_R) chosen so the saturation stays below one
        let cases = [
            (-0.04, 4.2, 0.2, 190.0, 312.0),
            (-0.2, 1.3, 0.35, 58.0, 415.0),
        ];
        let mut worst: f64 = 0.0;
        for &(u0, eta, g, gamma_atom, kw) in &cases {
            let mut params = params_template();
            params.u0 = u0;
            params.eta = vec![Complex64::new(eta, 0.0)];
            params.g_over_kappa = Some(g);
            params.gamma_atom_over_omega_r = Some(gamma_atom);
            params.kappa_over_omega_r = kw;
            let p = predict_single_atom(&params).map_err(|e| e.to_string())?;
            let ring = ring_multimode_predictions(&params, 2).map_err(|e| e.to_string())?;

            let coupling_ratio_sq = 1.0 / (g * g); // (κ/g)² in code units
            let scaled = p
                .tau_c_scaled_kappa
                .ok_or_else(|| "saturation-scaled cooling time missing".to_string())?;
            let tau_doppler = p
                .tau_c_doppler_omega_r
                .ok_or_else(|| "free-space reference cooling time missing".to_string())?;
            let n_ph = p
                .n_ph
                .ok_or_else(|| "photon budget missing".to_string())?;
            let n_ph_doppler = p
                .n_ph_doppler
                .ok_or_else(|| "free-space photon budget missing".to_string())?;

            let checks = [
                ("k_BT = κ/2", (p.k_b_t_kappa / 0.5 - 1.0).abs()),
                (
                    "τ_c equals its saturation-scaled form",
                    (p.tau_c_kappa / scaled - 1.0).abs(),
                ),
                (
                    "τ_c/τ_Doppler = (κ/g)²",
                    (p.tau_c_omega_r / tau_doppler / coupling_ratio_sq - 1.0).abs(),
                ),
                (
                    "N_ph/N_ph,Doppler = (κ/g)²",
                    (n_ph / n_ph_doppler / coupling_ratio_sq - 1.0).abs(),
                ),
                (
                    "two running modes halve τ_c",
                    (ring.tau_c_kappa / (p.tau_c_kappa / 2.0) - 1.0).abs(),
                ),
            ];
            for (name, err) in checks {
                if err > 1e-12 {
                    return Err(format!("{name}: relative error {err:.2e} (limit 1e-12)"));
                }
                worst = worst.max(err);
            }
        }
        Ok(format!(
            "five closed-form identities hold over both parameter sets (worst relative error {worst:.2e}, limit 1e-12)"
        ))
    });
}

#[test]
fn criterion_09_running_wave_pair_cools_twice_as_fast() {
    check(9, || {
        // single standing-wave comparator for the ring preset's lattice
        let mut single = params_template();
        single.n_atoms = 4;
        single.u0 = -0.2;
        single.gamma0 = 1e-3;
        single.delta = vec![-1.4];
        single.eta = vec![Complex64::new(3.6, 0.0)];
        single.kappa_over_omega_r = 50.0;
        single.dt = 2e-3;
        single.t_final = 900.0;
        single.n_trajectories = 200;
        single.seed = 7;
        let options = RunOptions {
            stride: 200,
            with_noise: true,
            e_kin_init: 100.0,
        };
        let series_single = run_ensemble(&single, &options).map_err(|e| e.to_string())?;
        let tau_single = fit_exponential(&series_single)
            .map_err(|e| e.to_string())?
            .tau_c;

        // the ring preset realizes the same lattice split over two running-wave
        // modes (couplings halved, pump divided by √2)
        let config = build(PresetName::Ring, None);
        let (ring, ring_options) = config.to_sim_params(7).map_err(|e| e.to_string())?;
        let series_ring = run_ensemble(&ring, &ring_options).map_err(|e| e.to_string())?;
        let tau_ring = fit_exponential(&series_ring)
            .map_err(|e| e.to_string())?
            .tau_c;

        let ratio = tau_ring / tau_single;
        let detail = format!(
            "τ_ring/τ_single = {tau_ring:.1}/{tau_single:.1} = {ratio:.3} (window [0.35, 0.7], target 0.5)"
        );
        if (0.35..=0.7).contains(&ratio) {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

/// Integrates the drift-only two-atom benchmark to t = 5 κ⁻¹ at the given step.
fn integrate_benchmark(dt: f64) -> SystemState {
    let mut params = params_template();
    params.n_atoms = 2;
    params.u0 = -0.3;
    params.gamma0 = 0.01;
    params.eta = vec![Complex64::new(2.0, 0.0)];
    params.kappa_over_omega_r = 50.0;
    params.dt = dt;
    let basis = build_mode_basis(params.mode_family).unwrap();
    let mut state = SystemState::new(
        vec![0.3, 1.1],
        vec![2.0, -1.5],
        vec![Complex64::new(0.0, 0.0)],
    );
    let mut ws = StepWorkspace::new();
    let steps = (5.0 / dt).round() as usize;
    for _ in 0..steps {
        step_deterministic(&mut state, &basis, &params, dt, &mut ws);
    }
    state
}

fn state_distance(a: &SystemState, b: &SystemState) -> f64 {
    let mut sq = 0.0;
    for i in 0..a.theta.len() {
        sq += (a.theta[i] - b.theta[i]).powi(2) + (a.p[i] - b.p[i]).powi(2);
    }
    for k in 0..a.alpha.len() {
        sq += (a.alpha[k] - b.alpha[k]).norm_sqr();
    }
    sq.sqrt()
}

#[test]
fn criterion_10_determinism_and_first_order_convergence() {
    check(10, || {
        // identical seeds must give byte-identical series for any worker count
        let mut outputs = Vec::new();
        for threads in ["1", "2", "3"] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let status = cavcool_command()
                .args([
                    "run", "--preset", "fig1", "--n-atoms", "1", "--trajectories", "8",
                    "--t-final", "20", "--seed", "123", "--threads", threads,
                    "--formats", "csv", "--out",
                ])
                .arg(dir.path())
                .stdout(Stdio::null())
                .stderr(Stdio::null())
                .status()
                .map_err(|e| e.to_string())?;
            // 20 κ⁻¹ of a hot start shows no decay, so exit 2 is the expected
            // verdict here; only the bytes matter
            let code = status.code().unwrap_or(-1);
            if code != 0 && code != 2 {
                return Err(format!("--threads {threads} exited with {code}"));
            }
            outputs
                .push(std::fs::read(dir.path().join("series.csv")).map_err(|e| e.to_string())?);
        }
        if !outputs.windows(2).all(|w| w[0] == w[1]) {
            return Err("series.csv differs across thread counts".into());
        }

        // drift-only convergence: halving dt must halve the endpoint error
        let reference = integrate_benchmark(3.125e-5);
        let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
            .iter()
            .map(|&dt| state_distance(&integrate_benchmark(dt), &reference))
            .collect();
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        let linear_ok = (1.7..=2.3).contains(&r1) && (1.7..=2.3).contains(&r2);
        let detail = format!(
            "series.csv byte-identical for 1/2/3 workers ({} bytes); dt-halving error ratios {r1:.2}, {r2:.2} (first-order target 2)",
            outputs[0].len()
        );
        if linear_ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}
