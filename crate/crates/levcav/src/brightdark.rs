//! Bright/dark hybrid-mode picture of the planar motion: exact canonical
//! transformations, analytic optical cooling rates, and the coupling window
//! where two-dimensional cooling works.
//!
//! A cavity mode driven by coherent scattering couples to a single linear
//! combination of the two transverse modes — the *bright* mode. The
//! orthogonal *dark* mode is invisible to the light and cools only through
//! its mechanical hybridization with the bright mode, at a rate set by the
//! trap anisotropy. Two exact transformations expose this structure:
//!
//! - **Geometric** ([`BrightDarkVariant::Geometric`]): rotate the physical
//!   position coordinates by the angle that aligns the bright axis with the
//!   optical gradient. Frequencies mix quadratically
//!   (`ω_b² = ω_x²sin²θ + ω_y²cos²θ`), the hybrid coupling is between
//!   positions only, and the dark mode decouples from the cavity exactly at
//!   the alignment angle. Zero-point scale factors √(ω_j/ω_b) keep the
//!   transformation canonical; the bright coordinate carries a sign
//!   convention that makes `g_b` negative for a positive drive amplitude.
//! - **Non-geometric** ([`BrightDarkVariant::NonGeometric`]): mix the
//!   annihilation operators with weights g_x/ε, g_y/ε (ε² = g_x² + g_y²).
//!   Frequencies mix linearly, the cavity couples to the bright mode with
//!   strength exactly ε, and the residual hybrid coupling acts on both
//!   quadratures (a beam-splitter interaction). A widely quoted first-order
//!   expansion of these couplings is provided by
//!   [`expanded_hybrid_couplings`] for comparison; it is *not* equivalent
//!   to the exact transform at finite trap splitting.
//!
//! The analytic cooling rates solve the self-consistent linear response of
//! one mode with the other eliminated:
//!
//! ```text
//! Γ_opt,j = Im[ 2i g_j² η(ω_j) / (1 − 2i g_k² χ_k(ω_j) η(ω_j)) ]
//! Γ_opt,b = Im[ 2i g_b² η(ω_b) + 4 g_bd² χ_d(ω_b) ]
//! Γ_opt,d = Im[ 4 g_bd² χ_b(ω_d) / (1 − 2i g_b² χ_b(ω_d) η(ω_d)) ]
//! ```
//!
//! with χ the mechanical and η the optical susceptibility. In the resolved
//! sideband regime at equal couplings these reduce to Γ_opt,b ≈ 4g_b²/κ and
//! Γ_opt,d ≈ g_bd²κ/g_b².
//!
//! Planar cooling to low occupancy requires the coupling to sit in a
//! window: strong enough that the bright mode outruns reheating
//! (g > √(κΓ/4)), weak enough that the dark mode stays hybridized rather
//! than protected (g < √(κ/16Γ)·|ω_y − ω_x|). [`goldilocks_bounds`] returns
//! this window, which closes entirely for near-degenerate traps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::params::DerivedParams;
use crate::spectra::{mechanical_susceptibility, optical_susceptibility};

/// Which exact bright/dark construction produced a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BrightDarkVariant {
    /// Rotation of the physical position coordinates; position–position
    /// hybrid coupling; `g_b` carries the rotation's sign convention.
    Geometric,
    /// Coupling-weighted mixing of the annihilation operators;
    /// both-quadrature (beam-splitter) hybrid coupling; `g_b = ε` exactly.
    NonGeometric,
}

/// Parameters of the hybridized bright/dark mode pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BrightDarkParams {
    /// Bright-mode frequency (rad/s).
    pub omega_b: f64,
    /// Dark-mode frequency (rad/s).
    pub omega_d: f64,
    /// Bright-mode optomechanical coupling (rad/s).
    pub g_b: f64,
    /// Bright–dark hybrid coupling (rad/s).
    pub g_bd: f64,
    /// Construction the parameters belong to.
    pub variant: BrightDarkVariant,
    /// Mixing angle used (rad); π/4 for symmetric couplings.
    pub theta_used: f64,
}

/// Exact geometric bright/dark transformation.
///
/// The mixing angle is chosen so the dark mode decouples from the light
/// exactly: tan θ = g_x√ω_x / (g_y√ω_y), which reduces to the tweezer
/// polarization angle when the couplings come from the scattering geometry.
pub fn geometric_transform(omega_x: f64, omega_y: f64, g_x: f64, g_y: f64) -> BrightDarkParams {
    let theta = (g_x * omega_x.sqrt()).atan2(g_y * omega_y.sqrt());
    let (s, c) = theta.sin_cos();
    let omega_b = (omega_x * omega_x * s * s + omega_y * omega_y * c * c).sqrt();
    let omega_d = (omega_x * omega_x * c * c + omega_y * omega_y * s * s).sqrt();
    let g_b = -(g_x * (omega_x / omega_b).sqrt() * s + g_y * (omega_y / omega_b).sqrt() * c);
    let g_bd = s * c * (omega_y * omega_y - omega_x * omega_x) / (2.0 * (omega_b * omega_d).sqrt());
    BrightDarkParams {
        omega_b,
        omega_d,
        g_b,
        g_bd,
        variant: BrightDarkVariant::Geometric,
        theta_used: theta,
    }
}

/// Exact non-geometric (coupling-weighted) bright/dark transformation.
pub fn nongeometric_transform(omega_x: f64, omega_y: f64, g_x: f64, g_y: f64) -> BrightDarkParams {
    let eps_sq = g_x * g_x + g_y * g_y;
    let eps = eps_sq.sqrt();
    let (omega_b, omega_d, g_bd) = if eps_sq > 0.0 {
        (
            (g_x * g_x * omega_x + g_y * g_y * omega_y) / eps_sq,
            (g_x * g_x * omega_y + g_y * g_y * omega_x) / eps_sq,
            g_x * g_y * (omega_x - omega_y) / (2.0 * eps_sq),
        )
    } else {
        (omega_x, omega_y, 0.0)
    };
    BrightDarkParams {
        omega_b,
        omega_d,
        g_b: eps,
        g_bd,
        variant: BrightDarkVariant::NonGeometric,
        theta_used: g_x.atan2(g_y),
    }
}

/// First-order expansion of the non-geometric hybrid couplings in the trap
/// splitting, as commonly quoted: returns `(g_b, g_bd)` at the
/// annihilation-operator level,
///
/// ```text
/// g_bd ≈ g_x g_y (ω_y − ω_x)/(g_x² + g_y²)
/// g_b  ≈ ε + (g_y² − g_x²)(ω_y − ω_x)/(4 ω_x ε).
/// ```
///
/// Kept for comparison only: the quadrature-level rate of the exact
/// transform is half the magnitude of the expanded `g_bd`, and the exact
/// bright coupling is ε with no frequency correction. At a typical few-%
/// trap splitting the expanded `g_b` deviates from the exact one at the
/// 10⁻³ level.
pub fn expanded_hybrid_couplings(omega_x: f64, omega_y: f64, g_x: f64, g_y: f64) -> (f64, f64) {
    let eps_sq = g_x * g_x + g_y * g_y;
    let eps = eps_sq.sqrt();
    let g_bd = g_x * g_y * (omega_y - omega_x) / eps_sq;
    let g_b = eps + (g_y * g_y - g_x * g_x) * (omega_y - omega_x) / (4.0 * omega_x * eps);
    (g_b, g_bd)
}

/// Canonical quadrature rotation from the (x, p_x, y, p_y, Z_L, P_L) basis
/// to (x_b, p_b, x_d, p_d, Z_L, P_L) for the given construction.
///
/// The matrix is symplectic; for the geometric variant it carries the
/// zero-point rescalings √(ω_j/ω_b), for the non-geometric variant it is
/// orthogonal (so total phonon number is preserved exactly).
pub fn brightdark_rotation(params: &BrightDarkParams, omega_x: f64, omega_y: f64) -> DMatrix<f64> {
    let (s, c) = params.theta_used.sin_cos();
    let mut u = DMatrix::<f64>::identity(6, 6);
    u[(0, 0)] = 0.0;
    u[(1, 1)] = 0.0;
    u[(2, 2)] = 0.0;
    u[(3, 3)] = 0.0;
    match params.variant {
        BrightDarkVariant::Geometric => {
            let (wb, wd) = (params.omega_b, params.omega_d);
            u[(0, 0)] = -s * (wb / omega_x).sqrt();
            u[(0, 2)] = -c * (wb / omega_y).sqrt();
            u[(1, 1)] = -s * (omega_x / wb).sqrt();
            u[(1, 3)] = -c * (omega_y / wb).sqrt();
            u[(2, 0)] = c * (wd / omega_x).sqrt();
            u[(2, 2)] = -s * (wd / omega_y).sqrt();
            u[(3, 1)] = c * (omega_x / wd).sqrt();
            u[(3, 3)] = -s * (omega_y / wd).sqrt();
        }
        BrightDarkVariant::NonGeometric => {
            u[(0, 0)] = s;
            u[(0, 2)] = c;
            u[(1, 1)] = s;
            u[(1, 3)] = c;
            u[(2, 0)] = c;
            u[(2, 2)] = -s;
            u[(3, 1)] = c;
            u[(3, 3)] = -s;
        }
    }
    u
}

/// Drift matrix of the hybridized system in the (x_b, p_b, x_d, p_d, Z_L,
/// P_L) basis, assembled from the analytic bright/dark parameters.
///
/// Geometric: position–position hybrid coupling (`ṗ_b ∝ −2g_bd·x_d`).
/// Non-geometric: beam-splitter coupling on both quadratures. In both
/// variants the cavity couples to the bright position only.
pub fn brightdark_drift(
    params: &BrightDarkParams,
    gamma: f64,
    kappa: f64,
    detuning: f64,
) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(6, 6);
    for (q, omega) in [(0, params.omega_b), (2, params.omega_d)] {
        a[(q, q)] = -0.5 * gamma;
        a[(q + 1, q + 1)] = -0.5 * gamma;
        a[(q, q + 1)] = omega;
        a[(q + 1, q)] = -omega;
    }
    a[(1, 2)] = -2.0 * params.g_bd;
    a[(3, 0)] = -2.0 * params.g_bd;
    if params.variant == BrightDarkVariant::NonGeometric {
        a[(0, 3)] = 2.0 * params.g_bd;
        a[(2, 1)] = 2.0 * params.g_bd;
    }
    a[(1, 4)] = -2.0 * params.g_b;
    a[(5, 0)] = -2.0 * params.g_b;
    a[(4, 4)] = -0.5 * kappa;
    a[(5, 5)] = -0.5 * kappa;
    a[(4, 5)] = -detuning;
    a[(5, 4)] = detuning;
    a
}

/// Analytic optical cooling rates of the bare and hybridized modes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoolingRates {
    /// Optical damping of the x mode with y adiabatically eliminated.
    pub gamma_opt_x: f64,
    /// Optical damping of the y mode with x adiabatically eliminated.
    pub gamma_opt_y: f64,
    /// Optical damping of the bright mode.
    pub gamma_opt_b: f64,
    /// Optical damping of the dark mode (through the bright mode).
    pub gamma_opt_d: f64,
    /// Resolved-sideband closed form 4g_b²/κ, filled at θ = π/4.
    pub approx_b: Option<f64>,
    /// Resolved-sideband closed form g_bd²κ/g_b², filled at θ = π/4.
    pub approx_d: Option<f64>,
}

impl CoolingRates {
    /// The bright/dark rate pair to base thermometry decisions on.
    ///
    /// At the symmetric mixing angle the hybrid frequencies are degenerate
    /// and the hybridization term of the full bright-rate expression is
    /// resonant on the bare (gas-damped) dark susceptibility, which makes
    /// it singular for levitated parameters; the resolved-sideband closed
    /// forms are the operative rates there. Away from the symmetric angle
    /// the full expressions apply.
    pub fn inference_rates(&self) -> (f64, f64) {
        (
            self.approx_b.unwrap_or(self.gamma_opt_b),
            self.approx_d.unwrap_or(self.gamma_opt_d),
        )
    }
}

/// Evaluate the analytic cooling-rate formulas at the configured cavity
/// parameters for the given bright/dark construction.
pub fn cooling_rates(derived: &DerivedParams, params: &BrightDarkParams) -> CoolingRates {
    let kappa = derived.config.kappa;
    let delta = derived.config.detuning;
    let gamma = derived.gamma_gas;
    let two_i = Complex64::new(0.0, 2.0);

    let single = |g_self: f64, omega_self: f64, g_other: f64, omega_other: f64| -> f64 {
        let eta = optical_susceptibility(kappa, delta, omega_self);
        let chi = mechanical_susceptibility(omega_other, gamma, omega_self);
        (two_i * g_self * g_self * eta / (Complex64::ONE - two_i * g_other * g_other * chi * eta))
            .im
    };
    let gamma_opt_x = single(derived.g_x, derived.omega_x, derived.g_y, derived.omega_y);
    let gamma_opt_y = single(derived.g_y, derived.omega_y, derived.g_x, derived.omega_x);

    let eta_b = optical_susceptibility(kappa, delta, params.omega_b);
    let chi_d = mechanical_susceptibility(params.omega_d, gamma, params.omega_b);
    let gamma_opt_b =
        (two_i * params.g_b * params.g_b * eta_b + 4.0 * params.g_bd * params.g_bd * chi_d).im;

    let eta_d = optical_susceptibility(kappa, delta, params.omega_d);
    let chi_b = mechanical_susceptibility(params.omega_b, gamma, params.omega_d);
    let gamma_opt_d = (4.0 * params.g_bd * params.g_bd * chi_b
        / (Complex64::ONE - two_i * params.g_b * params.g_b * chi_b * eta_d))
        .im;

    let symmetric = (params.theta_used - std::f64::consts::FRAC_PI_4).abs() < 1e-3;
    let g_b_sq = params.g_b * params.g_b;
    CoolingRates {
        gamma_opt_x,
        gamma_opt_y,
        gamma_opt_b,
        gamma_opt_d,
        approx_b: symmetric.then(|| 4.0 * g_b_sq / kappa),
        approx_d: (symmetric && g_b_sq > 0.0).then(|| params.g_bd * params.g_bd * kappa / g_b_sq),
    }
}

/// The coupling window for two-dimensional cooling.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GoldilocksZone {
    /// Lower bound: the bright mode must outrun reheating, g ≥ √(κΓ/4).
    pub g_min: f64,
    /// Upper bound: dark-mode protection must stay broken,
    /// g ≤ √(κ/16Γ)·|ω_y − ω_x|.
    pub g_max: f64,
    /// True when the window closes (g_min > g_max).
    pub empty: bool,
}

impl GoldilocksZone {
    /// Whether a coupling magnitude falls inside the window.
    pub fn contains(&self, g: f64) -> bool {
        !self.empty && g.abs() >= self.g_min && g.abs() <= self.g_max
    }
}

/// Coupling window from the cavity linewidth κ, the total heating rate Γ,
/// and the trap frequency split |ω_y − ω_x| (all rad/s).
pub fn goldilocks_bounds(kappa: f64, heating_rate: f64, frequency_split: f64) -> GoldilocksZone {
    let g_min = (0.25 * kappa * heating_rate).sqrt();
    let g_max = (kappa / (16.0 * heating_rate)).sqrt() * frequency_split.abs();
    GoldilocksZone {
        g_min,
        g_max,
        empty: g_min > g_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::coupling_table;
    use crate::model::{build_model, ModelMode};
    use crate::params::{derive_params, ExperimentConfig};
    use crate::HBAR;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn example() -> DerivedParams {
        derive_params(&ExperimentConfig::example()).unwrap()
    }

    /// Symplectic form with [x, p] = 2i pairs: block-diagonal J.
    fn symplectic_form(n_pairs: usize) -> DMatrix<f64> {
        let mut j = DMatrix::<f64>::zeros(2 * n_pairs, 2 * n_pairs);
        for k in 0..n_pairs {
            j[(2 * k, 2 * k + 1)] = 1.0;
            j[(2 * k + 1, 2 * k)] = -1.0;
        }
        j
    }

    #[test]
    fn frequency_invariants_hold_exactly() {
        let (wx, wy, gx, gy) = (2.1e6, 1.8e6, 2.5e5, 2.7e5);
        let geo = geometric_transform(wx, wy, gx, gy);
        assert_relative_eq!(
            geo.omega_b * geo.omega_b + geo.omega_d * geo.omega_d,
            wx * wx + wy * wy,
            max_relative = 1e-12
        );
        let ng = nongeometric_transform(wx, wy, gx, gy);
        assert_relative_eq!(ng.omega_b + ng.omega_d, wx + wy, max_relative = 1e-12);
        assert_relative_eq!(ng.g_b, gx.hypot(gy), max_relative = 1e-12);
        // Degenerate trap: the hybrid coupling vanishes identically.
        assert_eq!(geometric_transform(wx, wx, gx, gy).g_bd, 0.0);
        assert_eq!(nongeometric_transform(wx, wx, gx, gy).g_bd, 0.0);
    }

    #[test]
    fn symmetric_geometry_pins_the_bright_coupling() {
        // For couplings derived from the scattering geometry at tweezer
        // angle π/4 the mixing angle is exactly π/4 and the bright coupling
        // collapses to −E_d·k·(bright zero-point amplitude).
        let d = example();
        let geo = geometric_transform(d.omega_x, d.omega_y, d.g_x, d.g_y);
        assert_abs_diff_eq!(geo.theta_used, FRAC_PI_4, epsilon = 1e-12);
        let bzpf = (HBAR / (2.0 * d.mass * geo.omega_b)).sqrt();
        assert_relative_eq!(geo.g_b, -d.e_d * d.k * bzpf, max_relative = 1e-12);
        assert!(geo.g_b < 0.0);
        // Equal frequencies of the hybrid pair at the symmetric angle.
        assert_relative_eq!(geo.omega_b, geo.omega_d, max_relative = 1e-12);
    }

    #[test]
    fn rotations_are_symplectic_and_nongeometric_is_orthogonal() {
        let (wx, wy, gx, gy) = (2.3e6, 1.7e6, 1.9e5, 3.1e5);
        let j = symplectic_form(3);
        for params in [
            geometric_transform(wx, wy, gx, gy),
            nongeometric_transform(wx, wy, gx, gy),
        ] {
            let u = brightdark_rotation(&params, wx, wy);
            let residual = (&u * &j * u.transpose() - &j).norm();
            assert!(residual < 1e-12, "symplectic residual {residual:.3e}");
        }
        let ng = nongeometric_transform(wx, wy, gx, gy);
        let u = brightdark_rotation(&ng, wx, wy);
        let ortho = (&u * u.transpose() - DMatrix::<f64>::identity(6, 6)).norm();
        assert!(ortho < 1e-12, "orthogonality residual {ortho:.3e}");
    }

    #[test]
    fn analytic_drift_matches_the_rotated_model() {
        // Build the full model in the bare basis, rotate it with the
        // canonical transformation, and compare against the drift assembled
        // directly from the analytic bright/dark parameters.
        let d = example();
        let table = coupling_table(&d, 0.0);
        let model = build_model(&d, &table, ModelMode::TwoD);
        for params in [
            geometric_transform(d.omega_x, d.omega_y, d.g_x, d.g_y),
            nongeometric_transform(d.omega_x, d.omega_y, d.g_x, d.g_y),
        ] {
            let u = brightdark_rotation(&params, d.omega_x, d.omega_y);
            let u_inv = u.clone().try_inverse().unwrap();
            let rotated = &u * &model.drift * &u_inv;
            let analytic =
                brightdark_drift(&params, d.gamma_gas, d.config.kappa, d.config.detuning);
            let scale = analytic.norm();
            let residual = (&rotated - &analytic).norm();
            assert!(
                residual < 1e-12 * scale,
                "{:?}: drift residual {residual:.3e} vs scale {scale:.3e}",
                params.variant
            );
            // The dark mode is decoupled from the light: the rotated model
            // has no dark ↔ cavity entries.
            for (r, c) in [(3, 4), (3, 5), (5, 2), (4, 2), (2, 4), (2, 5)] {
                assert!(
                    rotated[(r, c)].abs() < 1e-12 * params.g_b.abs(),
                    "dark-cavity leak at ({r},{c}): {:.3e}",
                    rotated[(r, c)]
                );
            }
        }
    }

    #[test]
    fn orthogonal_mixing_preserves_the_total_occupancy() {
        use crate::model::{covariance_occupancies, steady_state_covariance};
        let d = example();
        let table = coupling_table(&d, 0.0);
        let model = build_model(&d, &table, ModelMode::TwoD);
        let v = steady_state_covariance(&model.drift, &model.diffusion()).unwrap();
        let bare = covariance_occupancies(&model, &v);
        let ng = nongeometric_transform(d.omega_x, d.omega_y, d.g_x, d.g_y);
        let u = brightdark_rotation(&ng, d.omega_x, d.omega_y);
        let v_bd = &u * &v * u.transpose();
        let n_b = 0.25 * (v_bd[(0, 0)] + v_bd[(1, 1)]) - 0.5;
        let n_d = 0.25 * (v_bd[(2, 2)] + v_bd[(3, 3)]) - 0.5;
        assert_relative_eq!(n_b + n_d, bare[0] + bare[1], max_relative = 1e-9);
    }

    #[test]
    fn expanded_couplings_relate_to_the_exact_transform_as_documented() {
        let d = example();
        let ng = nongeometric_transform(d.omega_x, d.omega_y, d.g_x, d.g_y);
        let (g_b_exp, g_bd_exp) = expanded_hybrid_couplings(d.omega_x, d.omega_y, d.g_x, d.g_y);
        // Annihilation-level rate = twice the quadrature rate (sign
        // conventions differ; magnitudes must match exactly).
        assert_relative_eq!(g_bd_exp.abs(), 2.0 * ng.g_bd.abs(), max_relative = 1e-12);
        // The expanded bright coupling is NOT the exact ε: the deviation is
        // real (first order in the trap splitting) but small.
        let deviation = (g_b_exp - ng.g_b).abs() / ng.g_b;
        assert!(
            deviation > 1e-3 && deviation < 1e-2,
            "deviation {deviation:.3e} outside the documented band"
        );
    }

    #[test]
    fn single_mode_rate_reaches_the_resolved_sideband_limit() {
        let omega = 2.0 * PI * 3.0e5;
        let kappa = 2.0 * PI * 1.9e5;
        let g = 2.0 * PI * 4.0e4;
        let mut cfg = ExperimentConfig::example();
        cfg.kappa = kappa;
        cfg.detuning = -omega;
        let mut d = derive_params(&cfg).unwrap();
        d.omega_x = omega;
        d.omega_y = 0.77 * omega;
        d.g_x = g;
        d.g_y = 0.0;
        let params = nongeometric_transform(d.omega_x, d.omega_y, d.g_x, d.g_y);
        let rates = cooling_rates(&d, &params);
        assert_relative_eq!(rates.gamma_opt_x, 4.0 * g * g / kappa, max_relative = 0.05);
        // With g_y = 0 the y mode receives no optical damping.
        assert_abs_diff_eq!(rates.gamma_opt_y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_trap_saturates_at_the_gas_rate_and_stops_dark_cooling() {
        let mut d = example();
        d.omega_y = d.omega_x;
        d.g_y = d.g_x;
        let params = geometric_transform(d.omega_x, d.omega_y, d.g_x, d.g_y);
        let rates = cooling_rates(&d, &params);
        // Each bare mode saturates at the gas damping rate: the orthogonal
        // combination it must drag along is dark.
        assert_relative_eq!(rates.gamma_opt_x, d.gamma_gas, max_relative = 0.10);
        assert_relative_eq!(rates.gamma_opt_y, d.gamma_gas, max_relative = 0.10);
        // The dark mode has exactly no optical damping (g_bd = 0).
        assert_eq!(rates.gamma_opt_d, 0.0);
        assert!(rates.gamma_opt_b > 1e4 * d.gamma_gas);
    }

    #[test]
    fn rate_formulas_match_the_drift_spectrum() {
        // The analytic rates must reproduce the eigenvalue linewidths of the
        // exact drift. Extract the gas-subtracted (dark, bright) linewidths:
        // the detuned cavity branch is κ-broad, so the two narrowest
        // positive-frequency branches are the mechanical pair, dark first.
        let kappa = 2.0 * PI * 2.0e5;
        let gamma = 2.0 * PI * 1.0;
        let eig_linewidths = |params: &BrightDarkParams, detuning: f64| -> (f64, f64) {
            let a = brightdark_drift(params, gamma, kappa, detuning);
            let mut mech: Vec<(f64, f64)> = a
                .complex_eigenvalues()
                .iter()
                .filter(|l| l.im > 0.0)
                .map(|l| (-2.0 * l.re, l.im))
                .collect();
            assert_eq!(mech.len(), 3, "expected three positive-frequency branches");
            mech.sort_by(|p, q| p.0.total_cmp(&q.0));
            assert!(mech[1].0 < 0.1 * mech[2].0, "cavity branch not separated");
            (mech[0].0 - gamma, mech[1].0 - gamma)
        };
        let mut d = example();
        d.config.kappa = kappa;
        d.gamma_gas = gamma;

        // Working point 1: hybrid frequencies well split. This is the domain
        // of the full rate expressions — the bright formula's hybridization
        // term samples the dark susceptibility off resonance and the dark
        // formula is the second-order self-energy from the optically dressed
        // bright response.
        let split = BrightDarkParams {
            omega_b: 2.0 * PI * 2.0e6,
            omega_d: 2.0 * PI * 1.55e6,
            g_b: 2.0 * PI * 2.5e4,
            g_bd: 2.0 * PI * 4.0e4,
            variant: BrightDarkVariant::Geometric,
            theta_used: 0.9,
        };
        d.config.detuning = -split.omega_b;
        let (dark_eig, bright_eig) = eig_linewidths(&split, d.config.detuning);
        let rates = cooling_rates(&d, &split);
        assert_relative_eq!(rates.gamma_opt_b, bright_eig, max_relative = 0.20);
        assert_relative_eq!(rates.gamma_opt_d, dark_eig, max_relative = 0.20);
        // Away from the symmetric angle the closed forms are not filled and
        // the full expressions are the inference rates.
        assert!(rates.approx_b.is_none() && rates.approx_d.is_none());
        assert_eq!(
            rates.inference_rates(),
            (rates.gamma_opt_b, rates.gamma_opt_d)
        );

        // Working point 2: symmetric angle, degenerate hybrid frequencies.
        // Here the resolved-sideband closed forms govern both linewidths,
        // and the dark formula resums onto its closed form. The bright
        // formula's hybridization term is resonant on the bare gas-damped
        // dark susceptibility and blows up as 4g_bd²/γ — orders of magnitude
        // above the true linewidth — which is exactly why inference_rates()
        // switches to the closed forms at this angle.
        let degenerate = BrightDarkParams {
            omega_b: 2.0 * PI * 2.0e6,
            omega_d: 2.0 * PI * 2.0e6,
            g_b: 2.0 * PI * 2.5e4,
            g_bd: 2.0 * PI * 1.5e3,
            variant: BrightDarkVariant::Geometric,
            theta_used: FRAC_PI_4,
        };
        d.config.detuning = -degenerate.omega_b;
        let (dark_eig, bright_eig) = eig_linewidths(&degenerate, d.config.detuning);
        let rates = cooling_rates(&d, &degenerate);
        let (approx_b, approx_d) = (rates.approx_b.unwrap(), rates.approx_d.unwrap());
        assert_relative_eq!(
            approx_b,
            4.0 * degenerate.g_b.powi(2) / kappa,
            epsilon = 1e-9
        );
        assert_relative_eq!(approx_b, bright_eig, max_relative = 0.20);
        assert_relative_eq!(approx_d, dark_eig, max_relative = 0.20);
        assert_relative_eq!(rates.gamma_opt_d, approx_d, max_relative = 0.01);
        assert!(rates.gamma_opt_b > 100.0 * approx_b);
        assert_eq!(rates.inference_rates(), (approx_b, approx_d));
    }

    #[test]
    fn coupling_window_matches_the_reference_point() {
        let kappa = 2.0 * PI * 1.93e5;
        let heating = 2.0 * PI * 1.5e4;
        let split = 2.0 * PI * 5.0e4;
        let zone = goldilocks_bounds(kappa, heating, split);
        assert_relative_eq!(zone.g_min / (2.0 * PI), 2.69e4, max_relative = 0.01);
        assert!(!zone.empty);
        assert!(zone.contains(1.2 * zone.g_min));
        assert!(!zone.contains(0.5 * zone.g_min));
        // A near-degenerate trap closes the window entirely.
        let closed = goldilocks_bounds(kappa, heating, 2.0 * PI * 1.0e3);
        assert!(closed.empty);
        assert!(!closed.contains(closed.g_min));
    }
}
