//! Shared helpers for the acceptance suite: a one-line pass/fail reporter,
//! a synthetic-system builder that exercises the linear model at arbitrary
//! rates, and an independent Euler–Maruyama ensemble integrator used as a
//! stochastic oracle for the frequency-domain solver.

use levcav::equilibrium::CouplingTable;
use levcav::model::LinearModel;
use levcav::{build_model, derive_params, DerivedParams, ExperimentConfig, ModelMode};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Print a single `[PASS]`/`[FAIL]` line for one acceptance check, then
/// assert. Every acceptance test funnels its verdict through here so the
/// suite output is one line per criterion.
pub fn check(name: &str, ok: bool, detail: &str) {
    let tag = if ok { "[PASS]" } else { "[FAIL]" };
    println!("{tag} {name}: {detail}");
    assert!(ok, "{name}: {detail}");
}

/// A fully synthetic operating point: every rate is chosen directly instead
/// of being derived from laboratory parameters. Used to probe the linear
/// model and the analytic formulas in regimes (large gas damping, exact
/// degeneracy, switched-off couplings) that no physical configuration of the
/// example apparatus reaches.
#[derive(Clone, Copy, Debug)]
pub struct SyntheticSystem {
    /// Trap frequency along the cavity axis (rad/s).
    pub omega_x: f64,
    /// Trap frequency perpendicular to the cavity axis (rad/s).
    pub omega_y: f64,
    /// Optomechanical coupling of x (rad/s).
    pub g_x: f64,
    /// Optomechanical coupling of y (rad/s).
    pub g_y: f64,
    /// Gas damping (rad/s).
    pub gamma: f64,
    /// Cavity decay (rad/s).
    pub kappa: f64,
    /// Drive detuning (rad/s, red < 0).
    pub detuning: f64,
    /// Thermal bath occupancy.
    pub n_bath: f64,
    /// Stored per-axis recoil rates (rad/s), same normalization as
    /// `DerivedParams::recoil`.
    pub recoil: [f64; 3],
}

impl SyntheticSystem {
    /// Derived parameters of the example apparatus with every rate this
    /// struct carries overridden.
    pub fn derived(&self) -> DerivedParams {
        let mut d = derive_params(&ExperimentConfig::example()).expect("example config derives");
        d.omega_x = self.omega_x;
        d.omega_y = self.omega_y;
        d.g_x = self.g_x;
        d.g_y = self.g_y;
        d.gamma_gas = self.gamma;
        d.n_bath = self.n_bath;
        d.recoil = self.recoil;
        d.config.kappa = self.kappa;
        d.config.detuning = self.detuning;
        d
    }

    /// The planar linear model at these rates, with each mechanical mode
    /// coupled to the amplitude quadrature only (standing-wave phase 0) and
    /// no direct springs.
    pub fn model(&self) -> LinearModel {
        let table = CouplingTable {
            g_x_zl: self.g_x,
            g_x_pl: 0.0,
            g_y_zl: self.g_y,
            g_y_pl: 0.0,
            g_z_zl: 0.0,
            g_z_pl: 0.0,
            g_xy: 0.0,
            g_xz: 0.0,
            g_yz: 0.0,
            z0_mean: 0.0,
            p0_mean: 0.0,
        };
        build_model(&self.derived(), &table, ModelMode::TwoD)
    }
}

/// Mechanical occupancies from an explicit Euler–Maruyama ensemble of the
/// model's Langevin equations — a time-domain oracle completely independent
/// of the frequency-domain solver.
///
/// Each trajectory integrates `dX = A·X·dt + gain·√(psd·dt)·ξ` from the
/// origin with its own deterministic ChaCha8 stream, discards `burn_steps`,
/// then accumulates the quadrature second moments over `avg_steps`. The
/// returned occupancies are `(⟨x²⟩ + ⟨p²⟩)/4 − ½` per mechanical mode,
/// averaged over time and ensemble.
///
/// Explicit Euler inflates the variance of a mode at frequency ω and
/// effective damping Γ by ≈ 1/(1 − ω²dt/Γ); callers pick `dt` so that bias
/// stays well inside their tolerance.
pub fn em_occupancies(
    model: &LinearModel,
    dt: f64,
    burn_steps: usize,
    avg_steps: usize,
    trajectories: usize,
    seed: u64,
) -> Vec<f64> {
    let dim = model.dim;
    // Drift premultiplied by dt, flattened row-major for the hot loop.
    let mut a_dt = vec![0.0_f64; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            a_dt[i * dim + j] = model.drift[(i, j)] * dt;
        }
    }
    let sigma: Vec<f64> = (0..dim)
        .map(|i| model.noise_gain[(i, i)] * (model.noise_psd[i] * dt).sqrt())
        .collect();
    let n_mech = model.mechanical_modes();

    let mut acc = vec![0.0_f64; 2 * n_mech];
    let mut state = vec![0.0_f64; dim];
    let mut next = vec![0.0_f64; dim];
    for traj in 0..trajectories {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_add((traj as u64).wrapping_mul(0x9E37_79B9)));
        state.fill(0.0);
        for step in 0..burn_steps + avg_steps {
            for i in 0..dim {
                let row = &a_dt[i * dim..(i + 1) * dim];
                let mut s = state[i];
                for (coeff, value) in row.iter().zip(state.iter()) {
                    s += coeff * value;
                }
                let xi: f64 = rng.sample(StandardNormal);
                next[i] = s + sigma[i] * xi;
            }
            std::mem::swap(&mut state, &mut next);
            if step >= burn_steps {
                for m in 0..n_mech {
                    acc[2 * m] += state[2 * m] * state[2 * m];
                    acc[2 * m + 1] += state[2 * m + 1] * state[2 * m + 1];
                }
            }
        }
    }
    let norm = (trajectories * avg_steps) as f64;
    (0..n_mech)
        .map(|m| 0.25 * (acc[2 * m] + acc[2 * m + 1]) / norm - 0.5)
        .collect()
}
