//! Two-dimensional cavity cooling of an optically levitated nanoparticle by
//! coherent scattering.
//!
//! A silica nanosphere is held in an optical tweezer inside a high-finesse
//! Fabry–Pérot cavity. The tweezer light that the particle scatters
//! coherently into the cavity mode couples the particle's transverse motion
//! to the cavity field; with the tweezer polarization at an angle to the
//! cavity axis *both* transverse modes couple, and a red-detuned cavity can
//! cool the full 2D motion towards the quantum ground state. Whether it
//! actually does depends on a three-way competition between optomechanical
//! cooling, gas and photon-recoil heating, and the formation of a "dark"
//! mechanical mode that decouples from the light when the two transverse
//! frequencies degenerate.
//!
//! This crate derives every rate in that competition from laboratory
//! parameters (pressure, tweezer power, particle size, waists, detuning, …),
//! builds the linearized optomechanical model, solves its steady state
//! exactly in the frequency domain, and maps out the parameter windows where
//! 2D ground-state cooling survives.
//!
//! # Modules
//!
//! - [`params`]: laboratory configuration and all derived single-particle
//!   quantities (trap frequencies, optomechanical couplings, gas damping,
//!   recoil heating).
//! - [`equilibrium`]: axial equilibrium displacement of the particle under
//!   the scattering force and the resulting standing-wave phase, plus the
//!   phase-rotated cavity couplings.
//! - [`model`]: the linearized drift/noise model in quadrature form, its
//!   steady-state covariance, the three-mode avoided-crossing structure, and
//!   eigenmode trajectories on the Bloch sphere of mechanical orientation.
//! - [`spectra`]: exact frequency-domain noise spectra (displacement and
//!   heterodyne), adaptive integration grids, and phonon-occupancy reports.
//! - [`brightdark`]: bright/dark mode transformations, analytic cooling-rate
//!   formulas, and the cooling-vs-dark-mode trade-off window.
//! - [`scan`]: deterministic, parallel parameter-space scans with CSV output.
//!
//! # Conventions
//!
//! Frequencies and rates are angular (rad/s) throughout unless a name or CSV
//! header says `_hz`. Quadratures are dimensionless with `x = b + b†`,
//! `p = i(b† − b)`, so `[x, p] = 2i` and a ground-state mode has unit
//! variance in each quadrature. Red detuning is negative (`detuning < 0`
//! cools). Symmetrized power spectral densities integrate as
//! `∫ S_jj(ω) dω / 2π = n_j + ½`.

pub mod brightdark;
pub mod equilibrium;
pub mod model;
pub mod params;
pub mod scan;
pub mod spectra;

pub use brightdark::{
    cooling_rates, goldilocks_bounds, BrightDarkParams, BrightDarkVariant, CoolingRates,
    GoldilocksZone,
};
pub use equilibrium::{
    axial_equilibrium, closed_form_equilibrium, coupling_table, rotated_mean_quadratures,
    CouplingTable, EquilibriumMethod, EquilibriumSolution,
};
pub use model::{
    bloch_trajectories, build_model, steady_state_covariance, three_mode_matrix,
    three_mode_structure, LinearModel, ModeTrajectories, ModelMode, ThreeModeStructure,
};
pub use params::{derive_params, DerivedParams, ExperimentConfig};
pub use scan::{
    run_scan, scan_detuning_spectra, scan_frequencies, scan_power_radius, DetuningRule,
    DetuningSpectraStack, ScanAxis, ScanOutputs, ScanParameter, ScanResult, ScanSpec,
};
pub use spectra::{
    bright_mode_thermometry, heterodyne_psd, occupancy, qlt_occupancies, transfer_psd,
    HeterodyneContext, OccupancyReport, SpectrumGrid, ThermometryReport,
};

/// Errors shared across the crate.
///
/// The three variants map onto the three failure classes a pipeline run can
/// hit: a configuration that is rejected before any physics is computed, a
/// numerical procedure that fails to reach its tolerance, and a model whose
/// linear dynamics are not stable (so no steady state exists).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The configuration is invalid (bad value, unknown field, unparseable
    /// file, or parameters outside the regime the model is valid in).
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative procedure (root find, adaptive integration, eigenmode
    /// tracking) failed to converge to its tolerance.
    #[error("convergence failure: {0}")]
    NonConvergence(String),

    /// The linearized dynamics have an eigenvalue with non-negative real
    /// part; steady-state quantities are undefined.
    #[error("unstable dynamics: {0}")]
    Instability(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;
/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum (m/s).
pub const C_LIGHT: f64 = 2.997_924_58e8;
/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;
