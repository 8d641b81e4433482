//! Laboratory configuration and derived single-particle quantities.
//!
//! Everything downstream — drift matrices, noise spectra, cooling rates,
//! parameter scans — is a function of a handful of laboratory numbers: gas
//! pressure and temperature, cavity linewidth and geometry, tweezer power,
//! waists and angles, and the particle's size and material. This module
//! turns those raw numbers into the physical rates of the linearized
//! dynamics:
//!
//! - mechanical trap frequencies `ω_x > ω_y` (for `w_x < w_y`) and `ω_z`
//!   from the harmonic expansion of the Gaussian tweezer potential,
//! - zero-point motions and the coherent-scattering couplings `g_x`, `g_y`
//!   set by the dipole's drive field `E_d`, the cavity wavenumber, and the
//!   tweezer polarization angle `θ_tw`,
//! - gas damping `γ` in the free-molecular (Epstein) regime with diffuse
//!   reflection, the bath occupancy `n̄` at the mean trap frequency, and the
//!   photon-recoil heating rates from Rayleigh scattering,
//! - the axial equilibrium shift `z0` produced by radiation pressure and the
//!   resulting standing-wave phase `ξ` (delegated to [`crate::equilibrium`]).
//!
//! # Validity
//!
//! The polarizability and recoil expressions assume a dipolar (Rayleigh)
//! scatterer; configurations with `radius > wavelength / 4` are rejected
//! outright rather than silently extrapolated.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::{Error, Result, AMU, C_LIGHT, EPS0, HBAR, KB};

/// Mean molar mass of air in atomic mass units.
const AIR_MASS_AMU: f64 = 28.97;

/// Epstein drag coefficient for diffuse reflection off the sphere surface.
const EPSTEIN_DIFFUSE: f64 = 1.0 + std::f64::consts::PI / 8.0;

/// Dipole radiation-pattern weights of recoil heating along (x, y, z) for a
/// tweezer propagating along z: 2/5 perpendicular to the polarization in the
/// transverse plane, 1/5 along it, and 7/5 along the propagation axis where
/// the standing-wave intensity gradient dominates.
const RECOIL_PATTERN: [f64; 3] = [2.0 / 5.0, 1.0 / 5.0, 7.0 / 5.0];

fn default_relative_permittivity() -> f64 {
    2.1
}

/// Raw laboratory parameters of a coherent-scattering cooling experiment.
///
/// All dimensioned fields are SI: pressures in Pa, temperatures in K, rates
/// and detunings in rad/s, lengths in m, powers in W, densities in kg/m³,
/// angles in rad. `detuning` is the drive-minus-cavity frequency, so red
/// (cooling) detunings are negative. `theta_tw` is the tweezer polarization
/// angle measured from the cavity axis and `phi_tw` locates the trap along
/// the standing wave (`π/2` is a field node, the usual operating point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Gas pressure (Pa).
    pub pressure: f64,
    /// Gas temperature (K).
    pub gas_temperature: f64,
    /// Cavity full linewidth (energy decay rate) κ (rad/s).
    pub kappa: f64,
    /// Cavity length (m).
    pub cavity_length: f64,
    /// Cavity mode waist (m).
    pub cavity_waist: f64,
    /// Tweezer (and cavity) wavelength (m).
    pub wavelength: f64,
    /// Particle mass density (kg/m³).
    pub density: f64,
    /// Particle radius (m).
    pub radius: f64,
    /// Tweezer optical power (W).
    pub tweezer_power: f64,
    /// Tweezer waist along x (m).
    pub waist_x: f64,
    /// Tweezer waist along y (m).
    pub waist_y: f64,
    /// Tweezer polarization angle from the cavity axis (rad), in [0, π].
    pub theta_tw: f64,
    /// Position of the trap along the cavity standing wave (rad), in [0, π];
    /// π/2 places the particle at a field node.
    pub phi_tw: f64,
    /// Drive detuning from the cavity resonance (rad/s); negative is red.
    pub detuning: f64,
    /// Local-oscillator offset for heterodyne detection (rad/s). When absent
    /// it defaults to 10× the largest mechanical frequency.
    #[serde(default)]
    pub lo_offset: Option<f64>,
    /// Relative permittivity of the particle material (silica by default).
    #[serde(default = "default_relative_permittivity")]
    pub relative_permittivity: f64,
    /// Optional per-axis override of the stored recoil rates (rad/s), in the
    /// same storage convention as [`DerivedParams::recoil`].
    #[serde(default)]
    pub recoil_override: Option<[f64; 3]>,
}

impl ExperimentConfig {
    /// A representative silica-nanosphere configuration used throughout the
    /// test-suite: a 71.5 nm sphere in a 0.4 W, 1064 nm elliptical tweezer
    /// at a node of a ~1 cm cavity, with the polarization at 45° and the
    /// drive red-detuned near the mean transverse trap frequency.
    pub fn example() -> Self {
        ExperimentConfig {
            pressure: 1e-4,                            // Pa
            gas_temperature: 300.0,                    // K
            kappa: 2.0 * std::f64::consts::PI * 193e3, // rad/s
            cavity_length: 1.07e-2,                    // m
            cavity_waist: 41.1e-6,                     // m
            wavelength: 1064e-9,                       // m
            density: 2000.0,                           // kg/m^3
            radius: 71.5e-9,                           // m
            tweezer_power: 0.4,                        // W
            waist_x: 0.600e-6,                         // m
            waist_y: 0.705e-6,                         // m
            theta_tw: std::f64::consts::FRAC_PI_4,
            phi_tw: std::f64::consts::FRAC_PI_2,
            detuning: -1.9611e6, // rad/s (~ -(omega_x+omega_y)/2)
            lo_offset: None,
            relative_permittivity: 2.1,
            recoil_override: None,
        }
    }

    /// Parse a configuration from a JSON string, rejecting unknown fields.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)
            .map_err(|e| Error::Config(format!("failed to parse configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and validate a configuration from a JSON file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read configuration {}: {e}", path.display()))
        })?;
        Self::from_json_str(&text)
    }

    /// Check every physical invariant the rest of the crate relies on.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pressure", self.pressure),
            ("gas_temperature", self.gas_temperature),
            ("kappa", self.kappa),
            ("cavity_length", self.cavity_length),
            ("cavity_waist", self.cavity_waist),
            ("wavelength", self.wavelength),
            ("density", self.density),
            ("radius", self.radius),
            ("tweezer_power", self.tweezer_power),
            ("waist_x", self.waist_x),
            ("waist_y", self.waist_y),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if !self.detuning.is_finite() {
            return Err(Error::Config("detuning must be finite".into()));
        }
        if let Some(lo) = self.lo_offset {
            if !lo.is_finite() || lo <= 0.0 {
                return Err(Error::Config(format!(
                    "lo_offset must be positive and finite, got {lo}"
                )));
            }
        }
        let pi = std::f64::consts::PI;
        if !(0.0..=pi).contains(&self.theta_tw) {
            return Err(Error::Config(format!(
                "theta_tw must lie in [0, pi], got {}",
                self.theta_tw
            )));
        }
        if !(0.0..=pi).contains(&self.phi_tw) {
            return Err(Error::Config(format!(
                "phi_tw must lie in [0, pi], got {}",
                self.phi_tw
            )));
        }
        if !self.relative_permittivity.is_finite() || self.relative_permittivity <= 1.0 {
            return Err(Error::Config(format!(
                "relative_permittivity must exceed 1, got {}",
                self.relative_permittivity
            )));
        }
        if self.radius > self.wavelength / 4.0 {
            return Err(Error::Config(format!(
                "radius {:.3e} m exceeds the Rayleigh (dipole) limit wavelength/4 = {:.3e} m; \
                 the point-dipole scattering model does not apply",
                self.radius,
                self.wavelength / 4.0
            )));
        }
        if let Some(r) = self.recoil_override {
            if r.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(Error::Config(format!(
                    "recoil_override entries must be non-negative and finite, got {r:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Every derived physical quantity of a validated configuration.
///
/// Frequencies and rates are angular (rad/s); `xzpf`, `yzpf`, `zzpf` are the
/// zero-point motions (m) that make the dimensionless quadratures
/// `x = b + b†`. The original configuration is carried along so downstream
/// builders have κ, the detuning, and the angles available.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedParams {
    /// Particle mass (kg).
    pub mass: f64,
    /// Particle polarizability (C·m²/V).
    pub polarizability: f64,
    /// Cavity vacuum field amplitude (V/m).
    pub eps_c: f64,
    /// Tweezer field amplitude at focus (V/m).
    pub eps_tw: f64,
    /// Coherent-scattering drive rate E_d (rad/s), including the sin θ_tw
    /// projection of the tweezer polarization onto the cavity axis.
    pub e_d: f64,
    /// Optical wavenumber 2π/λ (1/m).
    pub k: f64,
    /// Transverse trap frequency along x (rad/s).
    pub omega_x: f64,
    /// Transverse trap frequency along y (rad/s).
    pub omega_y: f64,
    /// Axial trap frequency (rad/s).
    pub omega_z: f64,
    /// Zero-point motion along x (m).
    pub xzpf: f64,
    /// Zero-point motion along y (m).
    pub yzpf: f64,
    /// Zero-point motion along z (m).
    pub zzpf: f64,
    /// Coherent-scattering coupling of x to the cavity quadrature Z (rad/s).
    pub g_x: f64,
    /// Coherent-scattering coupling of y to the cavity quadrature Z (rad/s).
    pub g_y: f64,
    /// Coupling of the axial motion to the cavity quadrature P (rad/s);
    /// vanishes at a node.
    pub g_zp: f64,
    /// Gas (Epstein) momentum damping rate (rad/s).
    pub gamma_gas: f64,
    /// Thermal bath occupancy at the mean transverse trap frequency.
    pub n_bath: f64,
    /// Stored per-axis recoil rates Γ_rec,j (rad/s): twice the physical
    /// phonon heating rate, the level injected into the momentum-quadrature
    /// noise PSD (see [`crate::model`]).
    pub recoil: [f64; 3],
    /// Total 2D heating rate γ·n̄ + mean physical recoil rate of x and y
    /// (rad/s), the Γ entering the cooling trade-off bounds.
    pub gamma_heat: f64,
    /// Axial equilibrium displacement from the tweezer focus (m).
    pub z0: f64,
    /// Standing-wave phase ξ = k·z0 − arctan(z0/z_R) accumulated at z0 (rad).
    pub xi: f64,
    /// Tweezer Rayleigh range (m).
    pub z_r: f64,
    /// The validated configuration these values derive from.
    pub config: ExperimentConfig,
}

impl DerivedParams {
    /// Mean transverse trap frequency (ω_x + ω_y)/2 (rad/s).
    pub fn mean_trap_frequency(&self) -> f64 {
        0.5 * (self.omega_x + self.omega_y)
    }

    /// Mean transverse coupling (g_x + g_y)/2 (rad/s).
    pub fn mean_coupling(&self) -> f64 {
        0.5 * (self.g_x + self.g_y)
    }

    /// Local-oscillator offset: configured value, else 10× the largest
    /// mechanical frequency (rad/s).
    pub fn lo_offset(&self) -> f64 {
        self.config
            .lo_offset
            .unwrap_or_else(|| 10.0 * self.omega_x.max(self.omega_y).max(self.omega_z))
    }
}

/// Derive every physical rate of the linearized model from a configuration.
///
/// # Errors
///
/// Returns [`Error::Config`] if the configuration is invalid (including a
/// particle outside the Rayleigh regime) and [`Error::NonConvergence`] if
/// the scattering force is too strong for an axial equilibrium to exist
/// inside the Rayleigh range.
pub fn derive_params(config: &ExperimentConfig) -> Result<DerivedParams> {
    config.validate()?;

    // Material response of the sphere.
    let volume = 4.0 * std::f64::consts::PI / 3.0 * config.radius.powi(3); // m^3
    let mass = config.density * volume; // kg
    let clausius = (config.relative_permittivity - 1.0) / (config.relative_permittivity + 2.0);
    let polarizability = 3.0 * EPS0 * volume * clausius;

    // Optical geometry and field amplitudes.
    let k = 2.0 * std::f64::consts::PI / config.wavelength; // 1/m
    let omega_laser = C_LIGHT * k; // rad/s
    let z_r = std::f64::consts::PI * config.waist_x * config.waist_y / config.wavelength; // m
    let eps_tw = (4.0 * config.tweezer_power
        / (std::f64::consts::PI * config.waist_x * config.waist_y * EPS0 * C_LIGHT))
        .sqrt(); // V/m
    let mode_volume =
        std::f64::consts::PI * config.cavity_waist.powi(2) * config.cavity_length / 4.0; // m^3
    let eps_c = (HBAR * omega_laser / (2.0 * EPS0 * mode_volume)).sqrt(); // V/m

    // Harmonic expansion of the tweezer potential around the focus.
    let curvature = polarizability * eps_tw * eps_tw / mass; // m^2/s^2 per m^2
    let omega_x = (curvature / (config.waist_x * config.waist_x)).sqrt();
    let omega_y = (curvature / (config.waist_y * config.waist_y)).sqrt();
    let omega_z = (curvature / (2.0 * z_r * z_r)).sqrt();
    let xzpf = (HBAR / (2.0 * mass * omega_x)).sqrt();
    let yzpf = (HBAR / (2.0 * mass * omega_y)).sqrt();
    let zzpf = (HBAR / (2.0 * mass * omega_z)).sqrt();

    // Coherent-scattering drive and couplings. E_d carries the sin θ_tw
    // polarization projection; the transverse couplings pick up a further
    // sin θ_tw (for x) or cos θ_tw (for y) from the gradient direction and
    // sin φ_tw from the standing-wave slope at the trap position.
    let e_d = polarizability * eps_c * eps_tw * config.theta_tw.sin() / (2.0 * HBAR);
    let sin_phi = config.phi_tw.sin();
    let g_x = e_d * k * config.theta_tw.sin() * sin_phi * xzpf;
    let g_y = e_d * k * config.theta_tw.cos() * sin_phi * yzpf;
    let g_zp = -e_d * k * config.phi_tw.cos() * zzpf;

    // Gas damping in the free-molecular regime (Epstein, diffuse walls).
    let gas_mass = AIR_MASS_AMU * AMU; // kg
    let gas_density = config.pressure * gas_mass / (KB * config.gas_temperature); // kg/m^3
    let mean_speed = (8.0 * KB * config.gas_temperature / (std::f64::consts::PI * gas_mass)).sqrt(); // m/s
    let gamma_gas = EPSTEIN_DIFFUSE
        * (4.0 * std::f64::consts::PI / 3.0)
        * gas_density
        * mean_speed
        * config.radius.powi(2)
        / mass;

    // Thermal occupancy at the mean transverse frequency.
    let omega_mean = 0.5 * (omega_x + omega_y);
    let n_bath = 1.0 / (HBAR * omega_mean / (KB * config.gas_temperature)).exp_m1();

    // Photon recoil from Rayleigh scattering of the tweezer. The stored
    // rate is twice the physical phonon heating rate c_j R_sc (k z_zpf,j)²,
    // matching the level injected into the momentum-quadrature noise PSD.
    let recoil = match config.recoil_override {
        Some(r) => r,
        None => {
            let cross_section = k.powi(4) * polarizability * polarizability
                / (6.0 * std::f64::consts::PI * EPS0 * EPS0); // m^2
            let intensity = 2.0 * config.tweezer_power
                / (std::f64::consts::PI * config.waist_x * config.waist_y); // W/m^2
            let scatter_rate = cross_section * intensity / (HBAR * omega_laser); // photons/s
            let zpf = [xzpf, yzpf, zzpf];
            std::array::from_fn(|j| 2.0 * RECOIL_PATTERN[j] * scatter_rate * (k * zpf[j]).powi(2))
        }
    };
    let gamma_heat = gamma_gas * n_bath + (recoil[0] + recoil[1]) / 4.0;

    // Axial equilibrium under radiation pressure, and the standing-wave
    // phase (displacement phase advance minus the Gouy phase).
    let (z0, _residual) = crate::equilibrium::solve_axial_displacement(
        polarizability,
        eps_tw,
        k,
        z_r,
        clausius,
        config.radius,
    )?;
    let xi = k * z0 - (z0 / z_r).atan();

    Ok(DerivedParams {
        mass,
        polarizability,
        eps_c,
        eps_tw,
        e_d,
        k,
        omega_x,
        omega_y,
        omega_z,
        xzpf,
        yzpf,
        zzpf,
        g_x,
        g_y,
        g_zp,
        gamma_gas,
        n_bath,
        recoil,
        gamma_heat,
        z0,
        xi,
        z_r,
        config: config.clone(),
    })
}

/// Transverse couplings (g_x, g_y) the configuration would have at a
/// different polarization angle, all other parameters fixed.
///
/// The drive `E_d ∝ sin θ` and the x-gradient projection contribute one
/// `sin θ` each, so `g_x ∝ sin²θ` while `g_y ∝ sin θ cos θ`; the ratio
/// `g_x/g_y = tan θ · xzpf/yzpf` holds identically.
pub fn coupling_rates(derived: &DerivedParams, theta_tw: f64) -> (f64, f64) {
    let bare_drive = derived.polarizability * derived.eps_c * derived.eps_tw / (2.0 * HBAR);
    let e_d = bare_drive * theta_tw.sin();
    let sin_phi = derived.config.phi_tw.sin();
    let g_x = e_d * derived.k * theta_tw.sin() * sin_phi * derived.xzpf;
    let g_y = e_d * derived.k * theta_tw.cos() * sin_phi * derived.yzpf;
    (g_x, g_y)
}
