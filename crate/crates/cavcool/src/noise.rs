//! Stochastic increments of the atom-field equations: direct recoil kicks, vacuum
//! field noise, and the correlated atom-field noise from coherent rescattering, plus
//! the analytic diffusion matrix they realize.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dynamics::FieldEval;
use crate::model::{ModeBasis, SimParams, SystemState};

/// One Euler-Maruyama step's worth of stochastic increments.
#[derive(Debug, Clone, Default)]
pub struct NoiseIncrement {
    pub dp: Vec<f64>,
    pub dalpha: Vec<Complex64>,
}

impl NoiseIncrement {
    pub fn zeros(n_atoms: usize, n_modes: usize) -> Self {
        NoiseIncrement {
            dp: vec![0.0; n_atoms],
            dalpha: vec![Complex64::new(0.0, 0.0); n_modes],
        }
    }

    pub fn reset(&mut self, n_atoms: usize, n_modes: usize) {
        self.dp.clear();
        self.dp.resize(n_atoms, 0.0);
        self.dalpha.clear();
        self.dalpha.resize(n_modes, Complex64::new(0.0, 0.0));
    }
}

/// Reproducible per-trajectory generator: one ChaCha8 stream per trajectory index,
/// all derived from the master seed. Streams are independent and independent of how
/// trajectories are scheduled across threads.
pub fn trajectory_rng(master_seed: u64, trajectory_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trajectory_index);
    rng
}

/// Draws the uncorrelated noise: momentum recoil kicks of size √(2γ|E(θ_n)|²) per
/// atom and vacuum noise of size √(κ_k/2) per field quadrature.
pub fn spontaneous_increments<R: Rng + ?Sized>(
    state: &SystemState,
    basis: &ModeBasis,
    params: &SimParams,
    dt: f64,
    rng: &mut R,
) -> NoiseIncrement {
    let mut eval = FieldEval::default();
    eval.compute(state, basis);
    let mut out = NoiseIncrement::zeros(state.n_atoms(), basis.len());
    accumulate_spontaneous(&eval, params, dt, rng, &mut out);
    out
}

/// Draws the correlated rescattering noise: for each atom two Wiener increments drive
/// the stacked vector (∇E, −i f_k/2, f_k/2) rotated by half the gradient phase.
pub fn induced_increments<R: Rng + ?Sized>(
    state: &SystemState,
    basis: &ModeBasis,
    params: &SimParams,
    dt: f64,
    rng: &mut R,
) -> NoiseIncrement {
    let mut eval = FieldEval::default();
    eval.compute(state, basis);
    let mut out = NoiseIncrement::zeros(state.n_atoms(), basis.len());
    accumulate_induced(&eval, state, basis, params, dt, rng, &mut out);
    out
}

pub(crate) fn accumulate_spontaneous<R: Rng + ?Sized>(
    eval: &FieldEval,
    params: &SimParams,
    dt: f64,
    rng: &mut R,
    out: &mut NoiseIncrement,
) {
    let sqrt_dt = dt.sqrt();
    for (n, e) in eval.e.iter().enumerate() {
        let xi: f64 = rng.sample(StandardNormal);
        out.dp[n] += (2.0 * params.gamma0 * e.norm_sqr()).sqrt() * sqrt_dt * xi;
    }
    for (k, da) in out.dalpha.iter_mut().enumerate() {
        let amp = (params.kappa[k] / 2.0).sqrt() * sqrt_dt;
        let xr: f64 = rng.sample(StandardNormal);
        let xi: f64 = rng.sample(StandardNormal);
        *da += Complex64::new(amp * xr, amp * xi);
    }
}

/// Half-phase factor e^{iφ/2} with e^{iφ} = (∇E*)²/|∇E|², principal branch; φ = 0
/// where the gradient vanishes.
fn half_phase(de: Complex64) -> Complex64 {
    let g2 = de.conj() * de.conj();
    Complex64::from_polar(1.0, 0.5 * g2.arg())
}

pub(crate) fn accumulate_induced<R: Rng + ?Sized>(
    eval: &FieldEval,
    state: &SystemState,
    basis: &ModeBasis,
    params: &SimParams,
    dt: f64,
    rng: &mut R,
    out: &mut NoiseIncrement,
) {
    if params.gamma0 == 0.0 {
        return;
    }
    let scale = (2.0 * params.gamma0 * dt).sqrt();
    for n in 0..state.n_atoms() {
        let xi_plus: f64 = rng.sample(StandardNormal);
        let xi_minus: f64 = rng.sample(StandardNormal);
        let phase = half_phase(eval.de[n]);
        let m = eval.de[n] * phase;
        out.dp[n] += scale * (m.re * xi_plus + m.im * xi_minus);
        let mix = Complex64::new(-xi_minus, xi_plus);
        for k in 0..basis.len() {
            let q = basis.eval(k, state.theta[n]) * phase * 0.5;
            out.dalpha[k] += scale * q.conj() * mix;
        }
    }
}

/// Index of atom n's momentum row in the stacked noise basis {P_n, A_k^r, A_k^i}.
pub fn momentum_index(n: usize) -> usize {
    n
}

/// Index of mode k's real-quadrature row.
pub fn quadrature_re_index(n_atoms: usize, k: usize) -> usize {
    n_atoms + k
}

/// Index of mode k's imaginary-quadrature row.
pub fn quadrature_im_index(n_atoms: usize, n_modes: usize, k: usize) -> usize {
    n_atoms + n_modes + k
}

/// Diffusion matrix per unit time over the stacked basis {P_n, A_k^r, A_k^i}:
/// diagonal spontaneous terms plus the rank-two outer products of each atom's
/// rescattering noise vector. Symmetric positive semidefinite by construction.
pub fn diffusion_matrix(
    state: &SystemState,
    basis: &ModeBasis,
    params: &SimParams,
) -> DMatrix<f64> {
    let n_atoms = state.n_atoms();
    let n_modes = basis.len();
    let dim = n_atoms + 2 * n_modes;
    let mut eval = FieldEval::default();
    eval.compute(state, basis);

    let mut d = DMatrix::<f64>::zeros(dim, dim);
    for n in 0..n_atoms {
        d[(n, n)] = 2.0 * params.gamma0 * eval.e[n].norm_sqr();
    }
    for k in 0..n_modes {
        let half_kappa = params.kappa[k] / 2.0;
        let ir = quadrature_re_index(n_atoms, k);
        let ii = quadrature_im_index(n_atoms, n_modes, k);
        d[(ir, ir)] = half_kappa;
        d[(ii, ii)] = half_kappa;
    }

    let mut re_w = vec![0.0; dim];
    let mut im_w = vec![0.0; dim];
    for n in 0..n_atoms {
        re_w.iter_mut().for_each(|x| *x = 0.0);
        im_w.iter_mut().for_each(|x| *x = 0.0);
        let phase = half_phase(eval.de[n]);
        let m = eval.de[n] * phase;
        re_w[momentum_index(n)] = m.re;
        im_w[momentum_index(n)] = m.im;
        for k in 0..n_modes {
            let q = basis.eval(k, state.theta[n]) * phase * 0.5;
            let vr = q * Complex64::new(0.0, -1.0);
            re_w[quadrature_re_index(n_atoms, k)] = vr.re;
            im_w[quadrature_re_index(n_atoms, k)] = vr.im;
            re_w[quadrature_im_index(n_atoms, n_modes, k)] = q.re;
            im_w[quadrature_im_index(n_atoms, n_modes, k)] = q.im;
        }
        let w = 2.0 * params.gamma0;
        for i in 0..dim {
            for j in 0..dim {
                d[(i, j)] += w * (re_w[i] * re_w[j] + im_w[i] * im_w[j]);
            }
        }
    }
    d
}
