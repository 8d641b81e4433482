//! Exact frequency-domain solution of the linear model: transfer functions,
//! displacement and heterodyne power spectral densities, phonon occupancies,
//! and bright-mode thermometry.
//!
//! The Langevin system `ẋ = A x + B ξ` is solved in closed form at each
//! frequency through the transfer matrix `T(ω) = (−iω·I − A)⁻¹·B`, giving
//! the stationary spectra `S(ω) = T·N₀·T†` with N₀ the (unsymmetrized)
//! input-noise PSD matrix of [`LinearModel::input_psd_matrix`]. Phonon
//! occupancies follow from the area under both quadrature spectra,
//!
//! ```text
//! n_j = (1/2π) ∫ [S_qq(ω) + S_pp(ω)] dω / 4 − 1/2,
//! ```
//!
//! which for every stable model must agree with the Lyapunov steady-state
//! covariance — the primary correctness gate of the crate.
//!
//! The heterodyne branch assembles the photocurrent PSD of a local
//! oscillator beating at `lo_offset` with the cavity output
//! `â_out = â_in − √κ·â`: on the offset axis δ (distance from the beat
//! note) it reads `S_het(δ) = S_{a_out a_out†}(2Δ_LO + δ) + S_{a_out†
//! a_out}(−δ)`, with shot-noise floor exactly 1. Dividing the excess
//! `S_het − 1` by `κ·g²·|η(δ)|²` (η the optical susceptibility) converts
//! photocurrent into an effective displacement spectrum whose plain
//! integral estimates the mechanical occupancy — the thermometry rule whose
//! accuracy the Goldilocks analyses quantify.
//!
//! Frequency grids are built from the model's own eigenvalues: linear cores
//! of ≥ 20 points per half-linewidth around each resonance, geometric fans
//! between features, and a coarse backbone out to ±8× the largest system
//! frequency. Displacement spectra get an analytic 1/ω² tail correction;
//! occupancies are refined by doubling the grid density until they move by
//! less than 0.1%.

use nalgebra::{DMatrix, RowDVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{coupling_table, CouplingTable};
use crate::model::{build_model, LinearModel, ModelMode};
use crate::params::DerivedParams;
use crate::{Error, Result};

/// Mechanical susceptibility χ̃_j(ω) = ω_j/(ω_j² + γ²/4 − ω² − iωγ).
pub fn mechanical_susceptibility(omega_j: f64, gamma: f64, omega: f64) -> Complex64 {
    omega_j
        / Complex64::new(
            omega_j * omega_j + 0.25 * gamma * gamma - omega * omega,
            -omega * gamma,
        )
}

/// Optical susceptibility η(ω) = 2iΔ/((κ/2 − iω)² + Δ²).
pub fn optical_susceptibility(kappa: f64, detuning: f64, omega: f64) -> Complex64 {
    let l = Complex64::new(0.5 * kappa, -omega);
    Complex64::new(0.0, 2.0 * detuning) / (l * l + detuning * detuning)
}

/// Integration metadata carried by a [`SpectrumGrid`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct SpectrumGridMeta {
    /// Number of frequency points.
    pub points: usize,
    /// Refinement level (points per half-linewidth) the grid was built at.
    pub oversample: Option<usize>,
    /// Relative occupancy change in the last grid-doubling step.
    pub relative_change: Option<f64>,
    /// Set when the local-oscillator offset is within 4× the system band,
    /// where heterodyne sidebands start to overlap their mirror images.
    pub lo_overlap_warning: bool,
}

/// A frequency axis with named spectra evaluated on it.
///
/// `omega` is strictly increasing and symmetric about zero; it is the
/// Fourier frequency for displacement spectra and the offset from the
/// heterodyne beat note for the photocurrent spectra. `values` keeps
/// insertion order for reproducible export.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumGrid {
    /// Frequency axis (rad/s).
    pub omega: Vec<f64>,
    /// Named real arrays, one entry per `omega` point.
    pub values: Vec<(String, Vec<f64>)>,
    /// Integration/refinement metadata.
    pub meta: SpectrumGridMeta,
}

impl SpectrumGrid {
    /// Look up an array by name.
    pub fn array(&self, name: &str) -> Option<&[f64]> {
        self.values
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Append the arrays of `other`, which must share this grid's axis.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] when the axes differ.
    pub fn merge(&mut self, other: SpectrumGrid) -> Result<()> {
        if self.omega != other.omega {
            return Err(Error::Config(
                "cannot merge spectra computed on different frequency axes".into(),
            ));
        }
        self.values.extend(other.values);
        self.meta.lo_overlap_warning |= other.meta.lo_overlap_warning;
        Ok(())
    }
}

/// Build a symmetric frequency grid resolving features at ±center.
///
/// Each `(center, halfwidth)` pair (center ≥ 0; mirrored automatically)
/// gets a linear core spanning ±10 half-linewidths at `20·oversample + 1`
/// points plus geometric fans with ratio `1 + 1/oversample` reaching the
/// edges, on top of a coarse backbone covering `[−span, span]`.
pub fn symmetric_feature_grid(features: &[(f64, f64)], span: f64, oversample: usize) -> Vec<f64> {
    assert!(span > 0.0 && oversample >= 1);
    let ratio = 1.0 + 1.0 / oversample as f64;
    let mut pts: Vec<f64> = Vec::new();
    let coarse = 8 * oversample;
    for i in 0..=coarse {
        pts.push(-span + 2.0 * span * i as f64 / coarse as f64);
    }
    for &(center, halfwidth) in features {
        let h = halfwidth.max(1e-12);
        for sign in [1.0, -1.0] {
            let c = sign * center;
            let n_core = 20 * oversample;
            for i in 0..=n_core {
                let x = c - 10.0 * h + 20.0 * h * i as f64 / n_core as f64;
                if x.abs() <= span {
                    pts.push(x);
                }
            }
            let mut d = 10.0 * h;
            while d < 2.0 * span {
                d *= ratio;
                for x in [c + d, c - d] {
                    if x.abs() <= span {
                        pts.push(x);
                    }
                }
            }
        }
    }
    pts.push(-span);
    pts.push(span);
    pts.sort_by(f64::total_cmp);
    let h_min = features.iter().map(|f| f.1.max(1e-12)).fold(span, f64::min);
    let min_sep = h_min / (8.0 * oversample as f64);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|&q| p - q >= min_sep) {
            out.push(p);
        }
    }
    if let Some(last) = out.last_mut() {
        *last = span;
    }
    out
}

/// Frequency grid adapted to a model's eigenstructure: one feature per
/// positive-frequency eigenvalue, half-linewidth from its decay rate, and a
/// span of 8× the largest frequency scale (including linewidths).
pub fn resonance_grid(model: &LinearModel, oversample: usize) -> Vec<f64> {
    let eigs = model.drift.complex_eigenvalues();
    let mut features = Vec::new();
    let mut max_im = 0.0_f64;
    let mut max_re = 0.0_f64;
    for l in eigs.iter() {
        max_re = max_re.max(l.re.abs());
        if l.im > 0.0 {
            max_im = max_im.max(l.im);
            features.push((l.im, l.re.abs().max(1e-9 * l.im)));
        }
    }
    let span = 8.0 * max_im.max(2.0 * max_re).max(1e-12);
    symmetric_feature_grid(&features, span, oversample)
}

/// Transfer matrix T(ω) = (−iω·I − A)⁻¹·B of the model.
///
/// # Errors
///
/// [`Error::NonConvergence`] if the resolvent is singular, which requires ω
/// to sit exactly on an undamped eigenfrequency.
pub fn transfer_matrix(model: &LinearModel, omega: f64) -> Result<DMatrix<Complex64>> {
    let mut m = model.drift.map(|v| Complex64::new(-v, 0.0));
    for i in 0..model.dim {
        m[(i, i)] += Complex64::new(0.0, -omega);
    }
    let b = model.noise_gain.map(|v| Complex64::new(v, 0.0));
    m.lu().solve(&b).ok_or_else(|| {
        Error::NonConvergence(format!(
            "singular resolvent at omega = {omega:.6e} rad/s (undamped resonance)"
        ))
    })
}

fn quadratic_form(row: &RowDVector<Complex64>, n0: &DMatrix<Complex64>) -> f64 {
    (row * n0 * row.adjoint())[(0, 0)].re
}

/// Displacement-quadrature PSDs of a stable model on a frequency grid.
///
/// Produces `s_xx`/`s_pxpx`, `s_yy`/`s_pypy` (and `s_zz`/`s_pzpz` in 3D):
/// both quadratures of every mechanical mode, since occupancies are the
/// averaged area of the pair. Equivalent to the closed-form susceptibility
/// solution of the coupled equations; the matrix route generalizes it to
/// any coupling layout.
///
/// # Errors
///
/// [`Error::Instability`] for an unstable model; [`Error::NonConvergence`]
/// on a singular resolvent.
pub fn transfer_psd(model: &LinearModel, omega_grid: &[f64]) -> Result<SpectrumGrid> {
    let max_re = model.max_real_eigenvalue();
    if max_re >= 0.0 {
        return Err(Error::Instability(format!(
            "model has an eigenvalue with real part {max_re:.6e} >= 0; no stationary spectrum"
        )));
    }
    let n0 = model.input_psd_matrix();
    let n_mech = model.mechanical_modes();
    let rows: Vec<Vec<f64>> = omega_grid
        .par_iter()
        .map(|&w| {
            let t = transfer_matrix(model, w)?;
            let mut vals = Vec::with_capacity(2 * n_mech);
            for j in 0..n_mech {
                vals.push(quadratic_form(&t.row(2 * j).into_owned(), &n0));
                vals.push(quadratic_form(&t.row(2 * j + 1).into_owned(), &n0));
            }
            Ok(vals)
        })
        .collect::<Result<_>>()?;

    let labels: &[&str] = match n_mech {
        2 => &["s_xx", "s_pxpx", "s_yy", "s_pypy"],
        _ => &["s_xx", "s_pxpx", "s_yy", "s_pypy", "s_zz", "s_pzpz"],
    };
    let values = labels
        .iter()
        .enumerate()
        .map(|(k, name)| {
            (
                name.to_string(),
                rows.iter().map(|r| r[k]).collect::<Vec<f64>>(),
            )
        })
        .collect();
    Ok(SpectrumGrid {
        omega: omega_grid.to_vec(),
        values,
        meta: SpectrumGridMeta {
            points: omega_grid.len(),
            ..Default::default()
        },
    })
}

/// Cavity and local-oscillator parameters needed to assemble and rescale
/// the heterodyne spectrum (they are not recoverable from the drift matrix
/// alone).
#[derive(Debug, Clone, Serialize)]
pub struct HeterodyneContext {
    /// Cavity linewidth κ (rad/s).
    pub kappa: f64,
    /// Tweezer–cavity detuning Δ (rad/s).
    pub detuning: f64,
    /// Mean optomechanical coupling ḡ = (g_x + g_y)/2 used by the
    /// two-mode thermometry rescale (rad/s).
    pub mean_coupling: f64,
    /// Bright-mode coupling g_b; when present the bright-mode displacement
    /// estimate `s_xbxb` is emitted as well (rad/s).
    pub bright_coupling: Option<f64>,
    /// Local-oscillator offset Δ_LO from the tweezer frequency (rad/s).
    pub lo_offset: f64,
}

impl HeterodyneContext {
    /// Context for the configured detuning, couplings, and LO offset.
    pub fn from_derived(derived: &DerivedParams) -> Self {
        HeterodyneContext {
            kappa: derived.config.kappa,
            detuning: derived.config.detuning,
            mean_coupling: 0.5 * (derived.g_x.abs() + derived.g_y.abs()),
            bright_coupling: Some(derived.g_x.hypot(derived.g_y)),
            lo_offset: derived.lo_offset(),
        }
    }
}

/// Heterodyne photocurrent PSD and its displacement-calibrated rescalings
/// on the offset axis δ (distance from the LO beat note).
///
/// Emits `s_het` (shot-noise floor at exactly 1), `s_het_rescaled` =
/// (S_het − 1)/(κ·ḡ²·|η(δ)|²), and `s_xbxb` (same with ḡ → g_b) when the
/// context carries a bright-mode coupling. The two output-field spectra are
/// evaluated analytically at their shifted arguments, so the image band
/// near −2Δ_LO never needs to be sampled.
///
/// # Errors
///
/// [`Error::Instability`] for an unstable model; [`Error::NonConvergence`]
/// on a singular resolvent. A small LO offset only sets the overlap warning
/// flag in the metadata.
pub fn heterodyne_psd(
    model: &LinearModel,
    ctx: &HeterodyneContext,
    omega_grid: &[f64],
) -> Result<SpectrumGrid> {
    let max_re = model.max_real_eigenvalue();
    if max_re >= 0.0 {
        return Err(Error::Instability(format!(
            "model has an eigenvalue with real part {max_re:.6e} >= 0; no stationary spectrum"
        )));
    }
    let n0 = model.input_psd_matrix();
    let dim = model.dim;
    let zl = dim - 2;
    let sqrt_kappa = ctx.kappa.sqrt();
    let half_i = Complex64::new(0.0, 0.5);

    // Output-field row u(ν): â_out = â_in − √κ·â in noise-channel
    // coordinates, with â = (Ẑ_L + iP̂_L)/2 taken from the transfer rows.
    let output_row = |nu: f64| -> Result<RowDVector<Complex64>> {
        let t = transfer_matrix(model, nu)?;
        let mut u = RowDVector::from_element(dim, Complex64::ZERO);
        for c in 0..dim {
            u[c] = -sqrt_kappa * 0.5 * (t[(zl, c)] + Complex64::new(0.0, 1.0) * t[(zl + 1, c)]);
        }
        u[zl] += Complex64::new(0.5, 0.0);
        u[zl + 1] += half_i;
        Ok(u)
    };

    let rows: Vec<(f64, f64)> = omega_grid
        .par_iter()
        .map(|&delta| {
            // S_{a_out a_out†} at the image argument 2Δ_LO + δ.
            let u1 = output_row(2.0 * ctx.lo_offset + delta)?;
            let s1 = quadratic_form(&u1, &n0);
            // S_{a_out† a_out}(−δ) via w(ν) = conj(u(−ν)).
            let w = output_row(delta)?.map(|z| z.conj());
            let s2 = quadratic_form(&w, &n0);
            Ok((s1, s2))
        })
        .collect::<Result<_>>()?;

    let s_het: Vec<f64> = rows.iter().map(|&(s1, s2)| s1 + s2).collect();
    let g2 = ctx.mean_coupling * ctx.mean_coupling;
    let rescale = |g_sq: f64| -> Vec<f64> {
        omega_grid
            .iter()
            .zip(s_het.iter())
            .map(|(&delta, &s)| {
                let eta2 = optical_susceptibility(ctx.kappa, ctx.detuning, delta).norm_sqr();
                (s - 1.0) / (ctx.kappa * g_sq * eta2)
            })
            .collect()
    };
    let mut values = vec![
        ("s_het".to_string(), s_het.clone()),
        ("s_het_rescaled".to_string(), rescale(g2)),
    ];
    if let Some(g_b) = ctx.bright_coupling {
        values.push(("s_xbxb".to_string(), rescale(g_b * g_b)));
    }

    let band = model
        .drift
        .complex_eigenvalues()
        .iter()
        .map(|l| l.im.abs())
        .fold(0.0, f64::max);
    Ok(SpectrumGrid {
        omega: omega_grid.to_vec(),
        values,
        meta: SpectrumGridMeta {
            points: omega_grid.len(),
            lo_overlap_warning: ctx.lo_offset < 4.0 * band,
            ..Default::default()
        },
    })
}

/// Integrated phonon occupancies and thermometry estimates of a spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct OccupancyReport {
    /// Occupancy of the x mode.
    pub n_x: f64,
    /// Occupancy of the y mode.
    pub n_y: f64,
    /// Occupancy of the z mode (3D spectra only).
    pub n_z: Option<f64>,
    /// Planar total n_x + n_y.
    pub n_2d: f64,
    /// Occupancy inferred from the rescaled heterodyne spectrum.
    pub n_het: Option<f64>,
    /// Bright-mode occupancy from the bright-rescaled heterodyne spectrum.
    pub n_b: Option<f64>,
    /// Dark-mode occupancy by the thermometry inference rule (filled by
    /// [`bright_mode_thermometry`], never by raw integration).
    pub n_d: Option<f64>,
    /// Largest tail correction among the displacement integrals, as a
    /// fraction of the corrected integral.
    pub max_tail_fraction: f64,
    /// Copied from the spectrum metadata.
    pub lo_overlap_warning: bool,
    /// Whether the dark-mode inference was refused (set by thermometry).
    pub inference_refused: Option<bool>,
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    acc
}

/// Area of a displacement PSD including the analytic 1/ω² tail beyond the
/// grid edges; returns the area and the tail fraction.
fn displacement_area(name: &str, omega: &[f64], s: &[f64]) -> Result<(f64, f64)> {
    if let Some(i) = s.iter().position(|v| *v < 0.0) {
        return Err(Error::NonConvergence(format!(
            "negative value in {name} at omega = {:.6e} rad/s",
            omega[i]
        )));
    }
    let core = trapezoid(omega, s);
    let tail = s[0] * omega[0].abs() + s[s.len() - 1] * omega[omega.len() - 1];
    let total = core + tail;
    if total <= 0.0 {
        return Err(Error::NonConvergence(format!("empty spectrum {name}")));
    }
    let fraction = tail / total;
    if fraction > 0.01 {
        return Err(Error::NonConvergence(format!(
            "tail correction of {name} is {:.2}% of the integral; widen the frequency span",
            100.0 * fraction
        )));
    }
    Ok((total, fraction))
}

/// Integrate a spectrum into phonon occupancies.
///
/// Mechanical occupancies average the position and momentum quadrature
/// areas: `n = (∫S_qq + ∫S_pp)/(4·2π) − 1/2`, with a 1/ω² tail correction
/// per side. Heterodyne-derived estimates (`n_het`, `n_b`) are the plain
/// integrals of the rescaled arrays — their vacuum contribution is already
/// removed by the shot-noise subtraction, and their tails carry no
/// displacement-like model, so no correction is applied.
///
/// # Errors
///
/// [`Error::Config`] when the grid lacks the mechanical arrays;
/// [`Error::NonConvergence`] for negative PSD values, tail corrections
/// above 1%, or occupancies below the −0.01 numerical floor.
pub fn occupancy(spectrum: &SpectrumGrid) -> Result<OccupancyReport> {
    let omega = &spectrum.omega;
    let mut max_tail: f64 = 0.0;
    let mut mechanical = |q: &str, p: &str| -> Result<Option<f64>> {
        let (Some(sq), Some(sp)) = (spectrum.array(q), spectrum.array(p)) else {
            return Ok(None);
        };
        let (aq, fq) = displacement_area(q, omega, sq)?;
        let (ap, fp) = displacement_area(p, omega, sp)?;
        max_tail = max_tail.max(fq).max(fp);
        Ok(Some((aq + ap) / (4.0 * std::f64::consts::TAU) - 0.5))
    };
    let n_x = mechanical("s_xx", "s_pxpx")?
        .ok_or_else(|| Error::Config("spectrum carries no mechanical arrays".into()))?;
    let n_y = mechanical("s_yy", "s_pypy")?
        .ok_or_else(|| Error::Config("spectrum carries no y-mode arrays".into()))?;
    let n_z = mechanical("s_zz", "s_pzpz")?;

    let emission = |name: &str| -> Option<f64> {
        spectrum
            .array(name)
            .map(|s| trapezoid(omega, s) / std::f64::consts::TAU)
    };
    let n_het = emission("s_het_rescaled");
    let n_b = emission("s_xbxb");

    let report = OccupancyReport {
        n_x,
        n_y,
        n_z,
        n_2d: n_x + n_y,
        n_het,
        n_b,
        n_d: None,
        max_tail_fraction: max_tail,
        lo_overlap_warning: spectrum.meta.lo_overlap_warning,
        inference_refused: None,
    };
    for (label, value) in [
        ("n_x", Some(n_x)),
        ("n_y", Some(n_y)),
        ("n_z", n_z),
        ("n_het", n_het),
        ("n_b", n_b),
    ] {
        if let Some(v) = value {
            if v < -0.01 {
                return Err(Error::NonConvergence(format!(
                    "{label} = {v:.4e} is below the numerical floor; the integration failed"
                )));
            }
        }
    }
    Ok(report)
}

/// Grid-refinement ladder used by [`qlt_occupancies`].
const OVERSAMPLE_LADDER: [usize; 4] = [24, 48, 96, 192];
/// Occupancies are converged when a grid doubling moves them by less than
/// this relative amount.
const REFINEMENT_TOLERANCE: f64 = 1e-3;

/// Full spectral pipeline: build the model for the configured coupling
/// basis, refine the frequency grid until the occupancies converge, and
/// return the final spectrum with its report.
///
/// `with_heterodyne` also assembles the photocurrent spectra (at the
/// configured LO offset) on the same axis.
///
/// # Errors
///
/// Propagates instability and integration failures; fails with
/// [`Error::NonConvergence`] if the occupancies keep moving at the top of
/// the refinement ladder.
pub fn qlt_occupancies(
    derived: &DerivedParams,
    mode: ModelMode,
    with_heterodyne: bool,
) -> Result<(SpectrumGrid, OccupancyReport)> {
    let table = coupling_table(derived, derived.xi);
    qlt_occupancies_with_table(derived, &table, mode, with_heterodyne)
}

/// [`qlt_occupancies`] with an explicit coupling table (for rotated-basis
/// studies and custom coupling layouts).
///
/// # Errors
///
/// See [`qlt_occupancies`].
pub fn qlt_occupancies_with_table(
    derived: &DerivedParams,
    table: &CouplingTable,
    mode: ModelMode,
    with_heterodyne: bool,
) -> Result<(SpectrumGrid, OccupancyReport)> {
    let model = build_model(derived, table, mode);
    let ctx = HeterodyneContext::from_derived(derived);
    let mut previous: Option<(SpectrumGrid, OccupancyReport)> = None;
    for (step, &oversample) in OVERSAMPLE_LADDER.iter().enumerate() {
        let axis = resonance_grid(&model, oversample);
        let mut spectrum = transfer_psd(&model, &axis)?;
        if with_heterodyne {
            spectrum.merge(heterodyne_psd(&model, &ctx, &axis)?)?;
        }
        spectrum.meta.oversample = Some(oversample);
        let report = occupancy(&spectrum)?;
        if let Some((_, prev)) = &previous {
            let change = occupancy_change(prev, &report);
            if change < REFINEMENT_TOLERANCE {
                spectrum.meta.relative_change = Some(change);
                return Ok((spectrum, report));
            }
            if step + 1 == OVERSAMPLE_LADDER.len() {
                return Err(Error::NonConvergence(format!(
                    "occupancies still change by {change:.3e} at the finest grid refinement"
                )));
            }
        }
        previous = Some((spectrum, report));
    }
    unreachable!("refinement ladder is non-empty");
}

/// Largest relative occupancy movement between refinement steps, with a
/// +1/2 offset so ground-state-cooled values stay well conditioned.
fn occupancy_change(a: &OccupancyReport, b: &OccupancyReport) -> f64 {
    let pairs = [
        (Some(a.n_x), Some(b.n_x)),
        (Some(a.n_y), Some(b.n_y)),
        (a.n_z, b.n_z),
        (a.n_het, b.n_het),
        (a.n_b, b.n_b),
    ];
    let mut worst = 0.0_f64;
    for (pa, pb) in pairs {
        if let (Some(va), Some(vb)) = (pa, pb) {
            worst = worst.max((vb - va).abs() / (vb.abs() + 0.5));
        }
    }
    worst
}

/// Bright-mode thermometry outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ThermometryReport {
    /// Bright-mode occupancy from the bright-rescaled heterodyne integral.
    pub n_b: f64,
    /// Dark-mode estimate by the equal-rate inference rule; `None` when the
    /// inference is refused.
    pub n_d_inferred: Option<f64>,
    /// True when the cooling rates differ by more than the 3× threshold, so
    /// the dark mode cannot be assumed thermalized with the bright mode.
    pub inference_refused: bool,
    /// The bright/dark cooling-rate ratio the decision was based on.
    pub rate_ratio: f64,
}

/// Cooling rates may differ by at most this factor for the dark-mode
/// occupancy to be inferred from the bright mode.
const INFERENCE_RATE_RATIO: f64 = 3.0;

/// Infer bright- and dark-mode occupancies from a heterodyne spectrum.
///
/// The bright mode is read directly from the `s_xbxb` array. The dark mode
/// is invisible in the spectrum; when the optical cooling rates of the two
/// hybrid modes are within a factor [`INFERENCE_RATE_RATIO`] of each other
/// the two modes equilibrate similarly and `n_d ≈ n_b` is reported, flagged
/// as inferred. Otherwise the inference is refused (but `n_b` is still
/// returned).
///
/// # Errors
///
/// [`Error::Config`] when the spectrum lacks the bright-rescaled array.
pub fn bright_mode_thermometry(
    spectrum: &SpectrumGrid,
    gamma_opt_b: f64,
    gamma_opt_d: f64,
) -> Result<ThermometryReport> {
    let s = spectrum
        .array("s_xbxb")
        .ok_or_else(|| Error::Config("spectrum carries no bright-mode array".into()))?;
    let n_b = trapezoid(&spectrum.omega, s) / std::f64::consts::TAU;
    let hi = gamma_opt_b.abs().max(gamma_opt_d.abs());
    let lo = gamma_opt_b.abs().min(gamma_opt_d.abs());
    let rate_ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let inference_refused = rate_ratio > INFERENCE_RATE_RATIO;
    Ok(ThermometryReport {
        n_b,
        n_d_inferred: (!inference_refused).then_some(n_b),
        inference_refused,
        rate_ratio,
    })
}
