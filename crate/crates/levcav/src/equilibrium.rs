//! Axial equilibrium of the particle and the standing-wave phase it sets.
//!
//! Radiation pressure from Rayleigh scattering pushes the particle along the
//! tweezer axis until the restoring gradient force balances it. The
//! displacement `z0` from the focus matters because the particle no longer
//! sits at the same phase of the cavity standing wave it was aligned to: the
//! optical coupling acquires the phase `ξ = k·z0 − arctan(z0/z_R)` (travelled
//! phase minus Gouy phase), which mixes which cavity quadrature each
//! mechanical mode talks to and, away from a field node, generates direct
//! mechanical cross-couplings ("springs") proportional to the displaced mean
//! field.
//!
//! # Algorithm
//!
//! With `ζ = z/z_R` and `β = σ_scatt ε0 z_R / α`, the exact force balance
//! reduces to `ζ/(1+ζ²) = β`, whose stable root is
//! `ζ = (1 − √(1−4β²))/(2β)`. The solver nevertheless works on the raw
//! forces in newtons — a bracketed bisection with a secant acceleration step
//! on `[0, 0.99 z_R]` — so the reported residual is a physical force and the
//! reduction above serves as an independent oracle in the tests. For
//! `β ≳ 0.5` the scattering force exceeds the largest restoring force the
//! Gaussian beam can supply and no axial equilibrium exists.

use serde::Serialize;

use crate::params::DerivedParams;
use crate::{Error, Result, C_LIGHT, EPS0};

/// How an [`EquilibriumSolution`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumMethod {
    /// Leading-order closed form `z0 = q · (2k⁴z_R²/3) · R³`, valid for
    /// `z0 ≪ z_R`.
    ClosedForm,
    /// Bracketed root find on the exact force balance.
    RootFind,
}

/// Axial equilibrium displacement and the standing-wave phase at it.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSolution {
    /// Displacement from the tweezer focus (m).
    pub z0: f64,
    /// Standing-wave phase ξ = k·z0 − arctan(z0/z_R) (rad).
    pub xi: f64,
    /// How z0 was obtained.
    pub method: EquilibriumMethod,
    /// Net axial force at the reported z0 (N); a direct measure of solution
    /// quality against the natural scale of the scattering force at focus.
    pub residual_force: f64,
}

/// Scattering cross-section of a Rayleigh dipole (m²).
fn scattering_cross_section(k: f64, polarizability: f64) -> f64 {
    k.powi(4) * polarizability * polarizability / (6.0 * std::f64::consts::PI * EPS0 * EPS0)
}

/// Tweezer intensity on the axis at displacement z from the focus (W/m²).
fn axial_intensity(z: f64, peak_intensity: f64, z_r: f64) -> f64 {
    peak_intensity / (1.0 + (z / z_r).powi(2))
}

/// Radiation-pressure force along +z (N).
fn scattering_force(z: f64, sigma: f64, peak_intensity: f64, z_r: f64) -> f64 {
    sigma * axial_intensity(z, peak_intensity, z_r) / C_LIGHT
}

/// Axial gradient force (N); restoring towards the focus for z > 0.
fn gradient_force(z: f64, polarizability: f64, peak_intensity: f64, z_r: f64) -> f64 {
    let zeta = z / z_r;
    -polarizability * peak_intensity * zeta / (EPS0 * C_LIGHT * z_r * (1.0 + zeta * zeta).powi(2))
}

/// Solve the exact axial force balance; returns (z0, residual force).
///
/// Shared between [`crate::params::derive_params`] and the public
/// [`axial_equilibrium`] so both report identical displacements.
pub(crate) fn solve_axial_displacement(
    polarizability: f64,
    eps_tw: f64,
    k: f64,
    z_r: f64,
    _clausius: f64,
    _radius: f64,
) -> Result<(f64, f64)> {
    let peak_intensity = 0.5 * C_LIGHT * EPS0 * eps_tw * eps_tw; // W/m^2
    let sigma = scattering_cross_section(k, polarizability);
    let residual = |z: f64| {
        scattering_force(z, sigma, peak_intensity, z_r)
            + gradient_force(z, polarizability, peak_intensity, z_r)
    };

    let mut lo = 0.0_f64;
    let mut hi = 0.99 * z_r;
    let mut f_lo = residual(lo);
    let f_hi = residual(hi);
    if f_lo == 0.0 {
        return Ok((0.0, 0.0));
    }
    if f_lo > 0.0 && f_hi > 0.0 {
        return Err(Error::NonConvergence(format!(
            "no axial equilibrium inside the Rayleigh range: the scattering force exceeds \
             the maximum restoring gradient force (force ratio at the bracket edge {:.3})",
            f_hi / scattering_force(hi, sigma, peak_intensity, z_r)
        )));
    }

    // Bisection with a secant candidate each step: the secant point is used
    // whenever it falls safely inside the bracket, so convergence is
    // superlinear on this smooth residual while the bracket guarantees
    // robustness. Iterate down to machine resolution of the bracket — the
    // residual tolerance downstream (1e-9 of the focal scattering force) is
    // then met with orders of magnitude to spare.
    let mut f_hi = f_hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at machine resolution
        }
        let secant = if f_hi != f_lo {
            lo - f_lo * (hi - lo) / (f_hi - f_lo)
        } else {
            mid
        };
        let probe = if secant > lo && secant < hi {
            secant
        } else {
            mid
        };
        let f_probe = residual(probe);
        if f_probe == 0.0 {
            return Ok((probe, 0.0));
        }
        if (f_probe > 0.0) == (f_lo > 0.0) {
            lo = probe;
            f_lo = f_probe;
        } else {
            hi = probe;
            f_hi = f_probe;
        }
    }
    let z0 = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
    Ok((z0, residual(z0)))
}

/// Standing-wave phase at displacement z0: travelled phase minus Gouy phase.
fn standing_wave_phase(z0: f64, k: f64, z_r: f64) -> f64 {
    k * z0 - (z0 / z_r).atan()
}

/// Exact axial equilibrium by bracketed root find on the forces in newtons.
///
/// # Errors
///
/// [`Error::NonConvergence`] when the scattering force exceeds the largest
/// restoring force available inside the Rayleigh range (particle not trapped
/// axially).
pub fn axial_equilibrium(derived: &DerivedParams) -> Result<EquilibriumSolution> {
    let clausius =
        (derived.config.relative_permittivity - 1.0) / (derived.config.relative_permittivity + 2.0);
    let (z0, residual_force) = solve_axial_displacement(
        derived.polarizability,
        derived.eps_tw,
        derived.k,
        derived.z_r,
        clausius,
        derived.config.radius,
    )?;
    Ok(EquilibriumSolution {
        z0,
        xi: standing_wave_phase(z0, derived.k, derived.z_r),
        method: EquilibriumMethod::RootFind,
        residual_force,
    })
}

/// Leading-order closed-form equilibrium `z0 = q·(2k⁴z_R²/3)·R³` with
/// `q = (ε_R−1)/(ε_R+2)`.
///
/// Returns `None` when `z0/z_R ≥ 0.1`, where the small-displacement
/// expansion is no longer trustworthy; the reported residual is the actual
/// net force at the closed-form displacement (O(β²) of the focal scattering
/// force rather than zero — the honest price of the approximation).
pub fn closed_form_equilibrium(derived: &DerivedParams) -> Option<EquilibriumSolution> {
    let cfg = &derived.config;
    let clausius = (cfg.relative_permittivity - 1.0) / (cfg.relative_permittivity + 2.0);
    let z0 = clausius * (2.0 * derived.k.powi(4) * derived.z_r.powi(2) / 3.0) * cfg.radius.powi(3);
    if z0 / derived.z_r >= 0.1 {
        return None;
    }
    let peak_intensity = 0.5 * C_LIGHT * EPS0 * derived.eps_tw * derived.eps_tw;
    let sigma = scattering_cross_section(derived.k, derived.polarizability);
    let residual_force = scattering_force(z0, sigma, peak_intensity, derived.z_r)
        + gradient_force(z0, derived.polarizability, peak_intensity, derived.z_r);
    Some(EquilibriumSolution {
        z0,
        xi: standing_wave_phase(z0, derived.k, derived.z_r),
        method: EquilibriumMethod::ClosedForm,
        residual_force,
    })
}

/// Mean values of the optical quadratures rotated by the standing-wave
/// phase ξ: the displaced intracavity field that seeds the mechanical
/// spring couplings. Both vanish at a field node (φ_tw = π/2).
pub fn rotated_mean_quadratures(derived: &DerivedParams, xi: f64) -> (f64, f64) {
    let cfg = &derived.config;
    let delta = cfg.detuning;
    let kappa = cfg.kappa;
    let scale = -derived.e_d * cfg.phi_tw.cos() / (delta * delta + 0.25 * kappa * kappa);
    let z0_mean = scale * (2.0 * delta * xi.cos() - kappa * xi.sin());
    let p0_mean = scale * (2.0 * delta * xi.sin() + kappa * xi.cos());
    (z0_mean, p0_mean)
}

/// Bilinear coupling coefficients of the quadratic interaction potential in
/// a fixed ("lab") optical quadrature basis, for a particle sitting at
/// standing-wave phase ξ.
///
/// The phase distributes each mechanical mode's coupling between the two
/// optical quadratures — `(g_x_zl)² + (g_x_pl)²` is ξ-independent — and, off
/// a field node, the displaced mean field generates direct mechanical
/// cross-springs. Passing ξ = 0 yields the couplings in the rotated optical
/// basis that absorbs the phase (the conventional model); any two tables of
/// the same configuration are related by a rotation of the optical
/// quadratures and produce identical physical predictions.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingTable {
    /// x to the amplitude quadrature Z_L (rad/s).
    pub g_x_zl: f64,
    /// x to the phase quadrature P_L (rad/s).
    pub g_x_pl: f64,
    /// y to Z_L (rad/s).
    pub g_y_zl: f64,
    /// y to P_L (rad/s).
    pub g_y_pl: f64,
    /// z to Z_L (rad/s).
    pub g_z_zl: f64,
    /// z to P_L (rad/s).
    pub g_z_pl: f64,
    /// Direct x–y spring (rad/s).
    pub g_xy: f64,
    /// Direct x–z spring (rad/s).
    pub g_xz: f64,
    /// Direct y–z spring (rad/s).
    pub g_yz: f64,
    /// Mean amplitude quadrature at phase ξ (dimensionless).
    pub z0_mean: f64,
    /// Mean phase quadrature at phase ξ (dimensionless).
    pub p0_mean: f64,
}

/// Build the coupling table of a derived configuration at standing-wave
/// phase ξ (see [`CouplingTable`]).
pub fn coupling_table(derived: &DerivedParams, xi: f64) -> CouplingTable {
    let cfg = &derived.config;
    let (sin_xi, cos_xi) = xi.sin_cos();
    let (z0_mean, p0_mean) = rotated_mean_quadratures(derived, xi);
    let spring_scale = derived.e_d * derived.k * derived.k;
    CouplingTable {
        g_x_zl: derived.g_x * cos_xi,
        g_x_pl: derived.g_x * sin_xi,
        g_y_zl: derived.g_y * cos_xi,
        g_y_pl: derived.g_y * sin_xi,
        g_z_zl: -derived.g_zp * sin_xi,
        g_z_pl: derived.g_zp * cos_xi,
        g_xy: spring_scale
            * z0_mean
            * cfg.theta_tw.sin()
            * cfg.theta_tw.cos()
            * cfg.phi_tw.cos()
            * derived.xzpf
            * derived.yzpf,
        g_xz: spring_scale
            * p0_mean
            * cfg.theta_tw.sin()
            * cfg.phi_tw.sin()
            * derived.xzpf
            * derived.zzpf,
        g_yz: spring_scale
            * p0_mean
            * cfg.theta_tw.cos()
            * cfg.phi_tw.sin()
            * derived.yzpf
            * derived.zzpf,
        z0_mean,
        p0_mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_params, ExperimentConfig};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn example() -> DerivedParams {
        derive_params(&ExperimentConfig::example()).unwrap()
    }

    /// Dimensionless strength of the scattering force: the reduced balance
    /// is ζ/(1+ζ²) = β.
    fn beta(d: &DerivedParams) -> f64 {
        scattering_cross_section(d.k, d.polarizability) * EPS0 * d.z_r / d.polarizability
    }

    #[test]
    fn root_find_matches_the_reduced_quadratic_exactly() {
        let d = example();
        let b = beta(&d);
        // Stable root of the reduced balance beta*zeta^2 - zeta + beta = 0.
        let zeta_exact = (1.0 - (1.0 - 4.0 * b * b).sqrt()) / (2.0 * b);
        let sol = axial_equilibrium(&d).unwrap();
        assert_relative_eq!(sol.z0 / d.z_r, zeta_exact, max_relative = 1e-12);
        assert_eq!(sol.method, EquilibriumMethod::RootFind);
        // The displacement derive_params stored is the same solve.
        assert_relative_eq!(sol.z0, d.z0, max_relative = 1e-14);
        assert_relative_eq!(sol.xi, d.xi, max_relative = 1e-14);
    }

    #[test]
    fn residual_force_is_far_below_the_focal_scattering_force() {
        let d = example();
        let sol = axial_equilibrium(&d).unwrap();
        let peak_intensity = 0.5 * C_LIGHT * EPS0 * d.eps_tw * d.eps_tw;
        let sigma = scattering_cross_section(d.k, d.polarizability);
        let focal_force = scattering_force(0.0, sigma, peak_intensity, d.z_r);
        assert!(focal_force > 0.0);
        assert!(
            sol.residual_force.abs() < 1e-9 * focal_force,
            "residual {:.3e} N vs focal scattering force {:.3e} N",
            sol.residual_force,
            focal_force
        );
    }

    #[test]
    fn closed_form_deviates_by_beta_squared() {
        let d = example();
        let b = beta(&d);
        let root = axial_equilibrium(&d).unwrap();
        let closed = closed_form_equilibrium(&d).expect("z0/z_R just below the 0.1 gate");
        assert_eq!(closed.method, EquilibriumMethod::ClosedForm);
        assert_relative_eq!(closed.z0 / d.z_r, b, max_relative = 1e-12);
        // The leading-order form is off by beta^2 relative (about 1% here),
        // not smaller.
        let rel = (root.z0 - closed.z0) / root.z0;
        assert!(
            rel > 0.5 * b * b && rel < 1.5 * b * b,
            "closed-form deviation {rel:.3e} not of order beta^2 = {:.3e}",
            b * b
        );
        // Its force residual is honest: nonzero, O(beta^2) of the focal force.
        assert!(closed.residual_force.abs() > 0.0);
    }

    #[test]
    fn closed_form_is_withheld_beyond_a_tenth_of_the_rayleigh_range() {
        let mut cfg = ExperimentConfig::example();
        cfg.radius = 75e-9; // beta ≈ 0.115 > 0.1
        let d = derive_params(&cfg).unwrap();
        assert!(closed_form_equilibrium(&d).is_none());
        // The exact solver still works there.
        assert!(axial_equilibrium(&d).is_ok());
    }

    #[test]
    fn displacement_vanishes_with_the_radius_cubed() {
        let mut cfg = ExperimentConfig::example();
        cfg.radius = 10e-9;
        let d = derive_params(&cfg).unwrap();
        let root = axial_equilibrium(&d).unwrap();
        let closed = closed_form_equilibrium(&d).unwrap();
        assert_relative_eq!(root.z0, closed.z0, max_relative = 1e-6);
    }

    #[test]
    fn displacement_grows_monotonically_with_radius() {
        let mut prev = 0.0;
        for radius in [50e-9, 71.5e-9, 90e-9, 110e-9] {
            let mut cfg = ExperimentConfig::example();
            cfg.radius = radius;
            let d = derive_params(&cfg).unwrap();
            let sol = axial_equilibrium(&d).unwrap();
            assert!(sol.z0 > prev, "z0 not monotonic at R = {radius}");
            prev = sol.z0;
        }
    }

    #[test]
    fn too_strong_scattering_forces_are_reported_as_untrapped() {
        let mut cfg = ExperimentConfig::example();
        cfg.radius = 130e-9; // still Rayleigh-valid, but beta ≈ 0.6 > 1/2
        let err = derive_params(&cfg).unwrap_err();
        assert!(
            matches!(err, crate::Error::NonConvergence(_)),
            "expected a no-equilibrium convergence error, got {err}"
        );
    }

    #[test]
    fn mean_quadratures_rotate_as_a_vector() {
        let mut cfg = ExperimentConfig::example();
        cfg.phi_tw = 1.0; // off the node so the means are nonzero
        let d = derive_params(&cfg).unwrap();
        let (z0_0, p0_0) = rotated_mean_quadratures(&d, 0.0);
        for xi in [0.1, 0.64, 1.3, 2.9, -0.7] {
            let (z0_xi, p0_xi) = rotated_mean_quadratures(&d, xi);
            let (s, c) = xi.sin_cos();
            assert_relative_eq!(z0_xi, c * z0_0 - s * p0_0, max_relative = 1e-12);
            assert_relative_eq!(p0_xi, s * z0_0 + c * p0_0, max_relative = 1e-12);
            // Magnitude is rotation-invariant.
            assert_relative_eq!(z0_xi.hypot(p0_xi), z0_0.hypot(p0_0), max_relative = 1e-12);
        }
        // Unrotated values against the closed forms.
        let scale = -d.e_d * cfg.phi_tw.cos() / (cfg.detuning.powi(2) + 0.25 * cfg.kappa.powi(2));
        assert_relative_eq!(z0_0, scale * 2.0 * cfg.detuning, max_relative = 1e-12);
        assert_relative_eq!(p0_0, scale * cfg.kappa, max_relative = 1e-12);
    }

    #[test]
    fn mean_quadratures_vanish_at_a_node() {
        let d = example(); // phi_tw = pi/2
        let (z0_xi, p0_xi) = rotated_mean_quadratures(&d, d.xi);
        assert_abs_diff_eq!(z0_xi, 0.0, epsilon = 1e-20 * d.e_d);
        assert_abs_diff_eq!(p0_xi, 0.0, epsilon = 1e-20 * d.e_d);
    }

    #[test]
    fn phase_splits_couplings_without_changing_their_magnitude() {
        let d = example();
        for xi in [0.0, 0.3, d.xi, 1.9] {
            let t = coupling_table(&d, xi);
            assert_relative_eq!(t.g_x_zl.hypot(t.g_x_pl), d.g_x.abs(), max_relative = 1e-12);
            assert_relative_eq!(t.g_y_zl.hypot(t.g_y_pl), d.g_y.abs(), max_relative = 1e-12);
        }
        // At xi = 0 the phase-quadrature couplings of x and y vanish.
        let t0 = coupling_table(&d, 0.0);
        assert_eq!(t0.g_x_pl, 0.0);
        assert_eq!(t0.g_y_pl, 0.0);
        assert_relative_eq!(t0.g_x_zl, d.g_x, max_relative = 1e-14);
        assert_relative_eq!(t0.g_y_zl, d.g_y, max_relative = 1e-14);
    }

    #[test]
    fn node_configurations_have_no_springs_and_no_axial_coupling() {
        let d = example();
        let t = coupling_table(&d, d.xi);
        for (name, value) in [
            ("g_xy", t.g_xy),
            ("g_xz", t.g_xz),
            ("g_yz", t.g_yz),
            ("g_z_zl", t.g_z_zl),
            ("g_z_pl", t.g_z_pl),
        ] {
            assert_abs_diff_eq!(value / d.g_x, 0.0, epsilon = 1e-15);
            let _ = name;
        }
    }

    #[test]
    fn off_node_springs_follow_the_displaced_mean_field() {
        let mut cfg = ExperimentConfig::example();
        cfg.phi_tw = 1.1;
        let d = derive_params(&cfg).unwrap();
        let t = coupling_table(&d, d.xi);
        let expected_gxy = d.e_d
            * d.k.powi(2)
            * t.z0_mean
            * cfg.theta_tw.sin()
            * cfg.theta_tw.cos()
            * cfg.phi_tw.cos()
            * d.xzpf
            * d.yzpf;
        assert_relative_eq!(t.g_xy, expected_gxy, max_relative = 1e-14);
        assert!(t.g_xz != 0.0 && t.g_yz != 0.0);
        // The x/z spring ratio collapses to the zpf/polarization geometry.
        assert_relative_eq!(
            t.g_xz / t.g_yz,
            (cfg.theta_tw.tan()) * d.xzpf / d.yzpf,
            max_relative = 1e-12
        );
    }
}
