//! Deterministic, parallel parameter-space scans with machine-readable
//! output: rectangular grids over laboratory parameters with per-cell
//! occupancies, cooling rates, and coupling-window bounds, plus
//! detuning-resolved spectrum stacks for avoided-crossing maps.
//!
//! Scan cells are independent tasks. Each cell clones the base
//! configuration, applies its two axis values, re-derives every physical
//! quantity, and runs the full frequency-domain occupancy pipeline. Failures
//! are per-cell outcomes, never grid aborts: a dynamically unstable cell is
//! flagged `stable = false`, a cell whose integration does not settle is
//! flagged `converged = false`, and either way the cell keeps its place in
//! the grid with its occupancy fields left empty.
//!
//! Results are collected in row-major order (axis 1 outer, axis 2 inner)
//! by cell index, so a scan is byte-identical for any worker-thread count,
//! including single-threaded execution. CSV output carries provenance
//! comments (code version, SHA-256 of the base configuration, seed) ahead
//! of a lowercase snake_case header; values are SI, with angular
//! frequencies converted to Hz wherever a column name ends in `_hz`.
//!
//! Unless overridden, scans recompute the drive detuning per cell as
//! −Δ = (ω_x + ω_y)/2, keeping the cavity parked on the mean mechanical
//! sideband as the trap moves underneath it.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::brightdark::{cooling_rates, goldilocks_bounds, nongeometric_transform};
use crate::equilibrium::coupling_table;
use crate::model::{build_model, LinearModel, ModelMode};
use crate::params::{derive_params, DerivedParams, ExperimentConfig};
use crate::spectra::{
    heterodyne_psd, occupancy, qlt_occupancies, symmetric_feature_grid, transfer_psd,
    HeterodyneContext,
};
use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// A scannable laboratory parameter: an [`ExperimentConfig`] field that a
/// grid axis can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    /// Tweezer waist along the cavity axis (m).
    WaistX,
    /// Tweezer waist perpendicular to the cavity axis (m).
    WaistY,
    /// Particle radius (m).
    Radius,
    /// Tweezer input power (W).
    TweezerPower,
    /// Drive detuning Δ (rad/s); scanning it requires [`DetuningRule::Fixed`].
    Detuning,
    /// Tweezer polarization angle (rad).
    ThetaTw,
}

impl ScanParameter {
    /// The axis name as written in CLI flags and CSV headers.
    pub fn name(self) -> &'static str {
        match self {
            Self::WaistX => "waist_x",
            Self::WaistY => "waist_y",
            Self::Radius => "radius",
            Self::TweezerPower => "tweezer_power",
            Self::Detuning => "detuning",
            Self::ThetaTw => "theta_tw",
        }
    }

    /// CSV column name with its SI unit suffix.
    pub fn column_name(self) -> &'static str {
        match self {
            Self::WaistX => "waist_x_m",
            Self::WaistY => "waist_y_m",
            Self::Radius => "radius_m",
            Self::TweezerPower => "tweezer_power_w",
            Self::Detuning => "detuning_hz",
            Self::ThetaTw => "theta_tw_rad",
        }
    }

    /// Converts a configuration-unit axis value to its CSV column unit
    /// (angular frequencies become Hz).
    pub fn csv_value(self, value: f64) -> f64 {
        match self {
            Self::Detuning => value / TAU,
            _ => value,
        }
    }

    /// Writes the axis value into a configuration.
    pub fn apply(self, config: &mut ExperimentConfig, value: f64) {
        match self {
            Self::WaistX => config.waist_x = value,
            Self::WaistY => config.waist_y = value,
            Self::Radius => config.radius = value,
            Self::TweezerPower => config.tweezer_power = value,
            Self::Detuning => config.detuning = value,
            Self::ThetaTw => config.theta_tw = value,
        }
    }
}

impl FromStr for ScanParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "waist_x" => Ok(Self::WaistX),
            "waist_y" => Ok(Self::WaistY),
            "radius" => Ok(Self::Radius),
            "tweezer_power" => Ok(Self::TweezerPower),
            "detuning" => Ok(Self::Detuning),
            "theta_tw" => Ok(Self::ThetaTw),
            other => Err(Error::Config(format!(
                "unknown scan parameter `{other}` (expected one of waist_x, \
                 waist_y, radius, tweezer_power, detuning, theta_tw)"
            ))),
        }
    }
}

/// One axis of a rectangular scan: a parameter swept linearly over
/// `points ≥ 2` values from `min` to `max` (configuration units).
///
/// Parses from the CLI form `name:min:max:points`, e.g.
/// `waist_x:0.5e-6:0.8e-6:60`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanAxis {
    /// Which parameter this axis sweeps.
    pub parameter: ScanParameter,
    /// First grid value (configuration units).
    pub min: f64,
    /// Last grid value (configuration units).
    pub max: f64,
    /// Number of grid points, at least 2.
    pub points: usize,
}

impl ScanAxis {
    /// Builds an axis, validating the range and point count.
    pub fn new(parameter: ScanParameter, min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::Config(format!(
                "scan axis {} needs finite bounds with min < max, got {min:e}..{max:e}",
                parameter.name()
            )));
        }
        if points < 2 {
            return Err(Error::Config(format!(
                "scan axis {} needs at least 2 points, got {points}",
                parameter.name()
            )));
        }
        Ok(Self {
            parameter,
            min,
            max,
            points,
        })
    }

    /// The linearly spaced grid values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.min + step * i as f64)
            .collect()
    }
}

impl FromStr for ScanAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, points] = parts[..] else {
            return Err(Error::Config(format!(
                "scan axis `{s}` must have the form name:min:max:points"
            )));
        };
        let parameter = name.parse()?;
        let number = |field: &str, text: &str| -> Result<f64> {
            text.parse()
                .map_err(|_| Error::Config(format!("scan axis {field} `{text}` is not a number")))
        };
        let min = number("min", min)?;
        let max = number("max", max)?;
        let points = points
            .parse()
            .map_err(|_| Error::Config(format!("scan axis points `{points}` is not an integer")))?;
        Self::new(parameter, min, max, points)
    }
}

/// How each scan cell chooses its drive detuning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningRule {
    /// Recompute −Δ = (ω_x + ω_y)/2 per cell (the default: the drive tracks
    /// the mean mechanical sideband as the trap changes).
    #[default]
    MeanTrap,
    /// Keep the base configuration's detuning (or the axis value, when an
    /// axis sweeps the detuning itself).
    Fixed,
}

impl DetuningRule {
    fn label(self) -> &'static str {
        match self {
            Self::MeanTrap => "mean_trap",
            Self::Fixed => "fixed",
        }
    }
}

/// Which optional quantity groups a scan's CSV output carries; occupancies,
/// couplings, and flags are always present.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ScanOutputs {
    /// Per-mode optomechanical cooling rates Γ_opt,x and Γ_opt,y.
    pub rates: bool,
    /// Mean coupling and the cooling-window bounds g_min/g_max.
    pub bounds: bool,
}

/// Full description of a rectangular scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanSpec {
    /// Outer (row) axis.
    pub axis1: ScanAxis,
    /// Inner (column) axis.
    pub axis2: ScanAxis,
    /// Base configuration every cell starts from (axis values and the
    /// detuning rule are applied on top of this).
    pub base: ExperimentConfig,
    /// Planar or three-dimensional model per cell.
    pub mode: ModelMode,
    /// Per-cell detuning policy.
    pub detuning_rule: DetuningRule,
    /// Optional CSV column groups.
    pub outputs: ScanOutputs,
    /// Recorded in the output provenance; scans themselves are
    /// deterministic and consume no randomness.
    pub seed: u64,
}

impl ScanSpec {
    fn validate(&self) -> Result<()> {
        if self.axis1.parameter == self.axis2.parameter {
            return Err(Error::Config(format!(
                "both scan axes sweep {}; the axes must differ",
                self.axis1.parameter.name()
            )));
        }
        let sweeps_detuning = self.axis1.parameter == ScanParameter::Detuning
            || self.axis2.parameter == ScanParameter::Detuning;
        if sweeps_detuning && self.detuning_rule == DetuningRule::MeanTrap {
            return Err(Error::Config(
                "scanning the detuning requires the fixed detuning rule; \
                 the mean-trap rule would overwrite the axis value"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Derived per-cell quantities that exist whenever parameter derivation
/// succeeds, independent of whether the occupancy integration does.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CellPhysics {
    /// Drive detuning actually used (rad/s), after the detuning rule.
    pub detuning: f64,
    /// Trap frequency along the cavity axis (rad/s).
    pub omega_x: f64,
    /// Trap frequency perpendicular to the cavity axis (rad/s).
    pub omega_y: f64,
    /// Optomechanical coupling of x (rad/s).
    pub g_x: f64,
    /// Optomechanical coupling of y (rad/s).
    pub g_y: f64,
    /// Analytic cooling rate of x (rad/s).
    pub gamma_opt_x: f64,
    /// Analytic cooling rate of y (rad/s).
    pub gamma_opt_y: f64,
    /// Mean coupling (|g_x| + |g_y|)/2 (rad/s).
    pub g_mean: f64,
    /// Lower coupling-window bound at this cell's κ, heating rate, and trap
    /// split (rad/s).
    pub g_min: f64,
    /// Upper coupling-window bound (rad/s).
    pub g_max: f64,
}

/// Steady-state occupancies of a converged, stable cell.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CellOccupancies {
    /// Phonons in the x mode.
    pub n_x: f64,
    /// Phonons in the y mode.
    pub n_y: f64,
    /// Phonons in the axial mode (three-dimensional scans only).
    pub n_z: Option<f64>,
    /// Planar total n_x + n_y.
    pub n_2d: f64,
}

/// One grid cell: axis values, derived physics, occupancies, and outcome
/// flags. Every requested cell appears exactly once in a scan's output,
/// failed cells included.
#[derive(Clone, Debug, Serialize)]
pub struct ScanCell {
    /// Axis-1 value (configuration units).
    pub axis1_value: f64,
    /// Axis-2 value (configuration units).
    pub axis2_value: f64,
    /// Derived quantities; `None` when parameter derivation itself failed.
    pub physics: Option<CellPhysics>,
    /// Occupancies; `None` for unstable or unconverged cells.
    pub occupancies: Option<CellOccupancies>,
    /// False when the linear model is dynamically unstable (or could not be
    /// built); unstable cells carry no occupancies.
    pub stable: bool,
    /// False when the occupancy integration did not settle.
    pub converged: bool,
}

/// Provenance stamped into every scan product.
#[derive(Clone, Debug, Serialize)]
pub struct ScanProvenance {
    /// Crate version that produced the output.
    pub version: String,
    /// SHA-256 of the serialized base configuration.
    pub config_sha256: String,
    /// Seed recorded with the run (bookkeeping only; `None` for spectrum
    /// stacks, which take no seed).
    pub seed: Option<u64>,
}

impl ScanProvenance {
    fn new(config: &ExperimentConfig, seed: Option<u64>) -> Self {
        let serialized =
            serde_json::to_string(config).expect("configuration serialization is infallible");
        let digest = Sha256::digest(serialized.as_bytes());
        let mut config_sha256 = String::with_capacity(64);
        for byte in digest {
            let _ = write!(config_sha256, "{byte:02x}");
        }
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256,
            seed,
        }
    }
}

/// A completed rectangular scan: row-major cells plus everything needed to
/// reproduce them.
#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    /// The spec the scan ran with.
    pub spec: ScanSpec,
    /// Cells in row-major order: `cells[i1 * axis2.points + i2]`.
    pub cells: Vec<ScanCell>,
    /// Version, config hash, and seed.
    pub provenance: ScanProvenance,
}

impl ScanResult {
    /// The cell at grid position `(i1, i2)`.
    pub fn cell(&self, i1: usize, i2: usize) -> &ScanCell {
        &self.cells[i1 * self.spec.axis2.points + i2]
    }

    /// Renders the scan as CSV: `#`-prefixed provenance comments, a header
    /// row, then one row per cell in row-major order. Missing values
    /// (unstable or unconverged cells) are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# levcav grid scan");
        let _ = writeln!(out, "# version={}", self.provenance.version);
        let _ = writeln!(out, "# config_sha256={}", self.provenance.config_sha256);
        if let Some(seed) = self.provenance.seed {
            let _ = writeln!(out, "# seed={seed}");
        }
        for (label, axis) in [("axis1", &self.spec.axis1), ("axis2", &self.spec.axis2)] {
            let _ = writeln!(
                out,
                "# {label}={}:{:e}:{:e}:{}",
                axis.parameter.name(),
                axis.min,
                axis.max,
                axis.points
            );
        }
        let mode = match self.spec.mode {
            ModelMode::TwoD => "2d",
            ModelMode::ThreeD => "3d",
        };
        let _ = writeln!(
            out,
            "# mode={mode} detuning_rule={}",
            self.spec.detuning_rule.label()
        );

        let mut columns: Vec<&str> = vec![
            self.spec.axis1.parameter.column_name(),
            self.spec.axis2.parameter.column_name(),
            "detuning_hz",
            "omega_x_hz",
            "omega_y_hz",
            "g_x_hz",
            "g_y_hz",
            "n_x",
            "n_y",
        ];
        if self.spec.mode == ModelMode::ThreeD {
            columns.push("n_z");
        }
        columns.push("n_2d");
        if self.spec.outputs.rates {
            columns.extend(["gamma_opt_x_hz", "gamma_opt_y_hz"]);
        }
        if self.spec.outputs.bounds {
            columns.extend(["g_mean_hz", "g_min_hz", "g_max_hz"]);
        }
        columns.extend(["stable", "converged"]);
        let _ = writeln!(out, "{}", columns.join(","));

        for cell in &self.cells {
            let mut fields: Vec<String> = vec![
                csv_number(self.spec.axis1.parameter.csv_value(cell.axis1_value)),
                csv_number(self.spec.axis2.parameter.csv_value(cell.axis2_value)),
            ];
            let p = cell.physics.as_ref();
            fields.push(csv_opt(p.map(|p| p.detuning / TAU)));
            fields.push(csv_opt(p.map(|p| p.omega_x / TAU)));
            fields.push(csv_opt(p.map(|p| p.omega_y / TAU)));
            fields.push(csv_opt(p.map(|p| p.g_x / TAU)));
            fields.push(csv_opt(p.map(|p| p.g_y / TAU)));
            let o = cell.occupancies.as_ref();
            fields.push(csv_opt(o.map(|o| o.n_x)));
            fields.push(csv_opt(o.map(|o| o.n_y)));
            if self.spec.mode == ModelMode::ThreeD {
                fields.push(csv_opt(o.and_then(|o| o.n_z)));
            }
            fields.push(csv_opt(o.map(|o| o.n_2d)));
            if self.spec.outputs.rates {
                fields.push(csv_opt(p.map(|p| p.gamma_opt_x / TAU)));
                fields.push(csv_opt(p.map(|p| p.gamma_opt_y / TAU)));
            }
            if self.spec.outputs.bounds {
                fields.push(csv_opt(p.map(|p| p.g_mean / TAU)));
                fields.push(csv_opt(p.map(|p| p.g_min / TAU)));
                fields.push(csv_opt(p.map(|p| p.g_max / TAU)));
            }
            fields.push(cell.stable.to_string());
            fields.push(cell.converged.to_string());
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }
}

fn csv_number(value: f64) -> String {
    format!("{value:.16e}")
}

fn csv_opt(value: Option<f64>) -> String {
    value.map(csv_number).unwrap_or_default()
}

/// Derives parameters with the drive detuning re-centered on the mean trap
/// frequency, −Δ = (ω_x + ω_y)/2.
///
/// The trap frequencies depend only on the tweezer, not on the detuning, so
/// a single re-derivation lands exactly on the rule.
///
/// # Errors
///
/// Propagates derivation failures from either pass.
pub fn derive_with_mean_detuning(config: &ExperimentConfig) -> Result<DerivedParams> {
    let first = derive_params(config)?;
    let mut tuned = config.clone();
    tuned.detuning = -0.5 * (first.omega_x + first.omega_y);
    derive_params(&tuned)
}

/// Runs a rectangular scan, filling every requested cell exactly once.
///
/// Cells are computed in parallel on the ambient rayon pool and collected
/// by index, so the result (and its CSV rendering) is identical for any
/// thread count.
///
/// # Errors
///
/// Fails only on an invalid spec ([`Error::Config`]); per-cell failures are
/// reported through the cell flags, never as grid errors.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let values1 = spec.axis1.values();
    let values2 = spec.axis2.values();
    let cells: Vec<ScanCell> = (0..values1.len() * values2.len())
        .into_par_iter()
        .map(|index| {
            let v1 = values1[index / values2.len()];
            let v2 = values2[index % values2.len()];
            compute_cell(spec, v1, v2)
        })
        .collect();
    Ok(ScanResult {
        spec: spec.clone(),
        cells,
        provenance: ScanProvenance::new(&spec.base, Some(spec.seed)),
    })
}

fn compute_cell(spec: &ScanSpec, v1: f64, v2: f64) -> ScanCell {
    let mut config = spec.base.clone();
    spec.axis1.parameter.apply(&mut config, v1);
    spec.axis2.parameter.apply(&mut config, v2);
    let derived = match spec.detuning_rule {
        DetuningRule::MeanTrap => derive_with_mean_detuning(&config),
        DetuningRule::Fixed => derive_params(&config),
    };
    let Ok(derived) = derived else {
        return ScanCell {
            axis1_value: v1,
            axis2_value: v2,
            physics: None,
            occupancies: None,
            stable: false,
            converged: false,
        };
    };

    let hybrid = nongeometric_transform(derived.omega_x, derived.omega_y, derived.g_x, derived.g_y);
    let rates = cooling_rates(&derived, &hybrid);
    let zone = goldilocks_bounds(
        derived.config.kappa,
        derived.gamma_heat,
        (derived.omega_y - derived.omega_x).abs(),
    );
    let physics = CellPhysics {
        detuning: derived.config.detuning,
        omega_x: derived.omega_x,
        omega_y: derived.omega_y,
        g_x: derived.g_x,
        g_y: derived.g_y,
        gamma_opt_x: rates.gamma_opt_x,
        gamma_opt_y: rates.gamma_opt_y,
        g_mean: derived.mean_coupling(),
        g_min: zone.g_min,
        g_max: zone.g_max,
    };

    let (occupancies, stable, converged) = match qlt_occupancies(&derived, spec.mode, false) {
        Ok((_, report)) => {
            // Sub-percent negative values are integration noise (larger ones
            // are rejected upstream); clamp so stable cells satisfy n ≥ 0.
            let n_x = report.n_x.max(0.0);
            let n_y = report.n_y.max(0.0);
            let cell = CellOccupancies {
                n_x,
                n_y,
                n_z: report.n_z.map(|n| n.max(0.0)),
                n_2d: n_x + n_y,
            };
            (Some(cell), true, true)
        }
        Err(Error::Instability(_)) => (None, false, true),
        Err(_) => (None, true, false),
    };
    ScanCell {
        axis1_value: v1,
        axis2_value: v2,
        physics: Some(physics),
        occupancies,
        stable,
        converged,
    }
}

/// Scans the two tweezer waists — the experimental handles on the trap
/// frequencies — mapping occupancy against the frequency split.
///
/// Expects a base configuration with the polarization near the symmetric
/// angle and the default mean-trap detuning rule, so the degeneracy ridge
/// and the optimal split band appear on the grid diagonal.
///
/// # Errors
///
/// [`Error::Config`] unless axis 1 sweeps `waist_x` and axis 2 `waist_y`.
pub fn scan_frequencies(spec: &ScanSpec) -> Result<ScanResult> {
    expect_axes(spec, ScanParameter::WaistX, ScanParameter::WaistY)?;
    run_scan(spec)
}

/// Scans tweezer power against particle radius — the coupling-strength
/// plane in which the ground-state cooling window opens and closes.
///
/// # Errors
///
/// [`Error::Config`] unless axis 1 sweeps `tweezer_power` and axis 2
/// `radius`.
pub fn scan_power_radius(spec: &ScanSpec) -> Result<ScanResult> {
    expect_axes(spec, ScanParameter::TweezerPower, ScanParameter::Radius)?;
    run_scan(spec)
}

fn expect_axes(spec: &ScanSpec, first: ScanParameter, second: ScanParameter) -> Result<()> {
    if spec.axis1.parameter != first || spec.axis2.parameter != second {
        return Err(Error::Config(format!(
            "this scan sweeps {} × {}, got {} × {}",
            first.name(),
            second.name(),
            spec.axis1.parameter.name(),
            spec.axis2.parameter.name()
        )));
    }
    Ok(())
}

/// Solves for the tweezer waists that realize the requested trap
/// frequencies at fixed power.
///
/// The trap frequencies follow exact power laws in the waists
/// (ω_x ∝ w_x^{−3/2} w_y^{−1/2} and symmetrically), so the log-linear
/// Newton step lands in one iteration; a few extra guard iterations protect
/// against configuration-dependent corrections.
///
/// # Errors
///
/// Propagates derivation failures; [`Error::NonConvergence`] if the solve
/// has not reached relative accuracy 1e-12 after eight steps.
pub fn waists_for_frequencies(
    config: &ExperimentConfig,
    omega_x: f64,
    omega_y: f64,
) -> Result<(f64, f64)> {
    if omega_x <= 0.0 || omega_y <= 0.0 {
        return Err(Error::Config(format!(
            "target trap frequencies must be positive, got {omega_x:e}, {omega_y:e}"
        )));
    }
    let mut tuned = config.clone();
    for _ in 0..8 {
        let derived = derive_params(&tuned)?;
        let a = (omega_x / derived.omega_x).ln();
        let b = (omega_y / derived.omega_y).ln();
        if a.abs().max(b.abs()) < 1e-12 {
            return Ok((tuned.waist_x, tuned.waist_y));
        }
        tuned.waist_x *= (-0.75 * a + 0.25 * b).exp();
        tuned.waist_y *= (0.25 * a - 0.75 * b).exp();
    }
    Err(Error::NonConvergence(
        "waist solve did not reach the target trap frequencies".into(),
    ))
}

/// Rescales a configuration to expose the bright/dark avoided crossing in a
/// detuning sweep: the cavity linewidth shrinks tenfold and the trap split
/// to a quarter (at fixed mean frequency), so the hybrid branches resolve
/// individually as the drive walks across them.
///
/// # Errors
///
/// Propagates derivation failures from the waist solve.
pub fn bright_dark_crossing_config(config: &ExperimentConfig) -> Result<ExperimentConfig> {
    let derived = derive_params(config)?;
    let mean = 0.5 * (derived.omega_x + derived.omega_y);
    let split = derived.omega_x - derived.omega_y;
    let (waist_x, waist_y) =
        waists_for_frequencies(config, mean + split / 8.0, mean - split / 8.0)?;
    let mut scaled = config.clone();
    scaled.waist_x = waist_x;
    scaled.waist_y = waist_y;
    scaled.kappa = config.kappa / 10.0;
    Ok(scaled)
}

/// One positive-frequency branch of the linear system at a given detuning.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectralBranch {
    /// Branch frequency (rad/s): the imaginary part of the eigenvalue.
    pub frequency: f64,
    /// Full linewidth (rad/s): −2 × the real part of the eigenvalue.
    pub linewidth: f64,
}

/// One detuning step of a spectrum stack.
#[derive(Clone, Debug, Serialize)]
pub struct DetuningRow {
    /// Drive detuning (rad/s).
    pub detuning: f64,
    /// Positive-frequency eigenbranches, ascending in frequency — the
    /// classical mode overlay for the heterodyne map.
    pub branches: Vec<SpectralBranch>,
    /// Planar occupancy from the displacement spectra, when integrable.
    pub n_2d: Option<f64>,
    /// Heterodyne photocurrent PSD on the stack's common frequency axis.
    pub s_het: Option<Vec<f64>>,
    /// Heterodyne PSD rescaled to displacement units.
    pub s_het_rescaled: Option<Vec<f64>>,
    /// False when this detuning renders the system unstable.
    pub stable: bool,
    /// False when the occupancy integration failed its quality gates.
    pub converged: bool,
}

/// A stack of heterodyne spectra over a detuning grid, on one shared
/// frequency axis, with per-detuning eigenbranch overlays.
#[derive(Clone, Debug, Serialize)]
pub struct DetuningSpectraStack {
    /// Common frequency axis (rad/s), resolving every branch of every row.
    pub omega: Vec<f64>,
    /// One row per requested detuning, in input order.
    pub rows: Vec<DetuningRow>,
    /// Grid oversampling used for the shared axis.
    pub oversample: usize,
    /// Version and config hash.
    pub provenance: ScanProvenance,
}

impl DetuningSpectraStack {
    /// Long-format CSV of the spectra: one row per (detuning, frequency)
    /// pair with `s_het` and `s_het_rescaled` columns. Rows without spectra
    /// (unstable detunings) appear in [`Self::to_branch_csv`] only.
    pub fn to_spectra_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# levcav detuning spectra");
        let _ = writeln!(out, "# version={}", self.provenance.version);
        let _ = writeln!(out, "# config_sha256={}", self.provenance.config_sha256);
        let _ = writeln!(out, "# oversample={}", self.oversample);
        let _ = writeln!(out, "detuning_hz,omega_hz,s_het,s_het_rescaled");
        for row in &self.rows {
            let (Some(s_het), Some(rescaled)) = (&row.s_het, &row.s_het_rescaled) else {
                continue;
            };
            for (i, &omega) in self.omega.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    csv_number(row.detuning / TAU),
                    csv_number(omega / TAU),
                    csv_number(s_het[i]),
                    csv_number(rescaled[i])
                );
            }
        }
        out
    }

    /// CSV of the classical-mode overlay: one row per (detuning, branch)
    /// with frequency, linewidth, occupancy, and outcome flags. Every
    /// requested detuning appears, including failed ones.
    pub fn to_branch_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# levcav detuning branches");
        let _ = writeln!(out, "# version={}", self.provenance.version);
        let _ = writeln!(out, "# config_sha256={}", self.provenance.config_sha256);
        let _ = writeln!(
            out,
            "detuning_hz,branch,frequency_hz,linewidth_hz,n_2d,stable,converged"
        );
        for row in &self.rows {
            for (index, branch) in row.branches.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{index},{},{},{},{},{}",
                    csv_number(row.detuning / TAU),
                    csv_number(branch.frequency / TAU),
                    csv_number(branch.linewidth / TAU),
                    csv_opt(row.n_2d),
                    row.stable,
                    row.converged
                );
            }
        }
        out
    }
}

/// Fixed oversampling for spectrum stacks: maps favor a predictable shared
/// axis over per-row refinement.
const STACK_OVERSAMPLE: usize = 48;

/// Computes heterodyne spectra and eigenbranch overlays across a detuning
/// grid on one shared frequency axis.
///
/// Instability or integration failure at one detuning flags that row and
/// moves on; the sweep itself never aborts on per-row numerics.
///
/// # Errors
///
/// [`Error::Config`] for an empty grid or a configuration that fails
/// derivation outright.
pub fn scan_detuning_spectra(
    config: &ExperimentConfig,
    detuning_grid: &[f64],
) -> Result<DetuningSpectraStack> {
    if detuning_grid.is_empty() {
        return Err(Error::Config("empty detuning grid".into()));
    }
    let models: Vec<(DerivedParams, LinearModel)> = detuning_grid
        .iter()
        .map(|&detuning| {
            let mut tuned = config.clone();
            tuned.detuning = detuning;
            let derived = derive_params(&tuned)?;
            let table = coupling_table(&derived, derived.xi);
            let model = build_model(&derived, &table, ModelMode::TwoD);
            Ok((derived, model))
        })
        .collect::<Result<_>>()?;

    // One axis for the whole stack: pool every row's eigenfeatures so each
    // spectrum is resolved wherever any branch can wander.
    let mut features = Vec::new();
    let mut span: f64 = 0.0;
    for (_, model) in &models {
        for eig in model.drift.complex_eigenvalues().iter() {
            if eig.im > 0.0 {
                features.push((eig.im, eig.re.abs().max(1e-9 * eig.im)));
                span = span.max(8.0 * eig.im.max(2.0 * eig.re.abs()));
            }
        }
    }
    let omega = symmetric_feature_grid(&features, span, STACK_OVERSAMPLE);

    let rows: Vec<DetuningRow> = models
        .par_iter()
        .map(|(derived, model)| {
            let mut branches: Vec<SpectralBranch> = model
                .drift
                .complex_eigenvalues()
                .iter()
                .filter(|eig| eig.im > 0.0)
                .map(|eig| SpectralBranch {
                    frequency: eig.im,
                    linewidth: -2.0 * eig.re,
                })
                .collect();
            branches.sort_by(|p, q| p.frequency.total_cmp(&q.frequency));
            let detuning = derived.config.detuning;
            if !model.is_stable() {
                return DetuningRow {
                    detuning,
                    branches,
                    n_2d: None,
                    s_het: None,
                    s_het_rescaled: None,
                    stable: false,
                    converged: true,
                };
            }
            let ctx = HeterodyneContext::from_derived(derived);
            let spectrum = transfer_psd(model, &omega).and_then(|mut s| {
                s.merge(heterodyne_psd(model, &ctx, &omega)?)?;
                Ok(s)
            });
            let Ok(spectrum) = spectrum else {
                return DetuningRow {
                    detuning,
                    branches,
                    n_2d: None,
                    s_het: None,
                    s_het_rescaled: None,
                    stable: true,
                    converged: false,
                };
            };
            let s_het = spectrum.array("s_het").map(<[f64]>::to_vec);
            let s_het_rescaled = spectrum.array("s_het_rescaled").map(<[f64]>::to_vec);
            let (n_2d, converged) = match occupancy(&spectrum) {
                Ok(report) => (Some(report.n_2d), true),
                Err(_) => (None, false),
            };
            DetuningRow {
                detuning,
                branches,
                n_2d,
                s_het,
                s_het_rescaled,
                stable: true,
                converged,
            }
        })
        .collect();

    Ok(DetuningSpectraStack {
        omega,
        rows,
        oversample: STACK_OVERSAMPLE,
        provenance: ScanProvenance::new(config, None),
    })
}
