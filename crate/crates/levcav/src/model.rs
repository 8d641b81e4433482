//! The linearized optomechanical model: drift, noise, steady state, and
//! eigenmode structure.
//!
//! Dynamics are written for dimensionless quadratures `x = b + b†`,
//! `p = i(b† − b)` of each mechanical mode and `Z_L = a + a†`,
//! `P_L = i(a† − a)` of the cavity field, stacked as
//! `(x, p_x, y, p_y, [z, p_z,] Z_L, P_L)`. A bilinear coupling `g·q·Q` in
//! the interaction Hamiltonian contributes `−2g` entries through the
//! equations of motion `q̇ = +2 ∂H/∂p`, `ṗ = −2 ∂H/∂q` of this `[x,p] = 2i`
//! convention, and each pair is damped at `−γ/2` (mechanics) or `−κ/2`
//! (cavity) on both quadratures.
//!
//! Noise enters as `ẋ = A x + B ξ(t)` with a diagonal gain
//! `B = diag(√γ, …, √κ, √κ)` and per-channel spectral levels
//! `⟨ξ_i(t) ξ_j(t')⟩`-style: `2n̄+1` on mechanical quadratures (plus
//! `2Γ_rec/γ` recoil on the momenta), `1` on the optical pair — vacuum and
//! thermal noise in the unsymmetrized convention whose imaginary,
//! antisymmetric part carries the canonical commutators. The symmetric part
//! alone drives the steady-state covariance (Lyapunov equation), which
//! serves as the exact cross-check for every spectral integral downstream.
//!
//! The module also exposes the conservative (dissipation-free) skeleton of
//! the dynamics in two equivalent forms used to understand hybridization:
//! the three-mode coupling matrix of `(x, Z_L, y)` near an avoided crossing
//! together with its exact link to the full drift, and the trajectories of
//! the three hybrid eigenmodes on the Bloch sphere of mechanical
//! orientation as the detuning is swept.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::equilibrium::CouplingTable;
use crate::params::DerivedParams;
use crate::{Error, Result};

/// Which mechanical modes the model includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    /// Transverse modes x and y plus the cavity (6×6).
    TwoD,
    /// Transverse plus axial motion (8×8).
    ThreeD,
}

/// Linearized drift/noise model `ẋ = A x + B ξ`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    /// State dimension (6 or 8).
    pub dim: usize,
    /// Drift matrix A (rad/s).
    pub drift: DMatrix<f64>,
    /// Noise gain B (diagonal; √rate units).
    pub noise_gain: DMatrix<f64>,
    /// Spectral level of each white-noise channel (dimensionless).
    pub noise_psd: DVector<f64>,
    /// Quadrature labels in state order.
    pub mode_labels: Vec<&'static str>,
}

impl LinearModel {
    /// Number of mechanical modes (excludes the cavity pair).
    pub fn mechanical_modes(&self) -> usize {
        (self.dim - 2) / 2
    }

    /// Largest real part among the drift eigenvalues (rad/s).
    pub fn max_real_eigenvalue(&self) -> f64 {
        self.drift
            .complex_eigenvalues()
            .iter()
            .map(|l| l.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every drift eigenvalue has a strictly negative real part.
    pub fn is_stable(&self) -> bool {
        self.max_real_eigenvalue() < 0.0
    }

    /// Symmetric diffusion matrix D = B·diag(psd)·Bᵀ driving the covariance.
    pub fn diffusion(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            d[(i, i)] = self.noise_gain[(i, i)].powi(2) * self.noise_psd[i];
        }
        d
    }

    /// Unsymmetrized input-noise PSD matrix N₀: the diagonal spectral levels
    /// plus the imaginary antisymmetric commutator part `±i` within each
    /// (q, p) pair, which encodes operator ordering for the heterodyne
    /// spectra. Its Hermitian symmetric part is `diag(noise_psd)`.
    pub fn input_psd_matrix(&self) -> DMatrix<Complex64> {
        let mut n0 = DMatrix::from_diagonal(&self.noise_psd.map(|v| Complex64::new(v, 0.0)));
        for pair in 0..self.dim / 2 {
            let q = 2 * pair;
            n0[(q, q + 1)] += Complex64::new(0.0, 1.0);
            n0[(q + 1, q)] += Complex64::new(0.0, -1.0);
        }
        n0
    }
}

/// Assemble the linear model from derived parameters and a coupling table.
///
/// The table fixes the optical quadrature basis (see
/// [`crate::equilibrium::coupling_table`]); tables of the same configuration
/// at different standing-wave phases produce models related by a rotation of
/// `(Z_L, P_L)` with identical spectra and occupancies.
pub fn build_model(derived: &DerivedParams, table: &CouplingTable, mode: ModelMode) -> LinearModel {
    let (dim, labels): (usize, Vec<&'static str>) = match mode {
        ModelMode::TwoD => (6, vec!["x", "p_x", "y", "p_y", "Z_L", "P_L"]),
        ModelMode::ThreeD => (8, vec!["x", "p_x", "y", "p_y", "z", "p_z", "Z_L", "P_L"]),
    };
    let gamma = derived.gamma_gas;
    let kappa = derived.config.kappa;
    let delta = derived.config.detuning;
    let zl = dim - 2; // index of Z_L; P_L follows

    let mut a = DMatrix::zeros(dim, dim);
    // Mechanical oscillators: indices (2j, 2j+1) with frequencies in order.
    let freqs: &[f64] = match mode {
        ModelMode::TwoD => &[derived.omega_x, derived.omega_y],
        ModelMode::ThreeD => &[derived.omega_x, derived.omega_y, derived.omega_z],
    };
    // Cavity-quadrature couplings (q, to Z_L, to P_L) per mechanical mode.
    let cavity: &[(f64, f64)] = match mode {
        ModelMode::TwoD => &[(table.g_x_zl, table.g_x_pl), (table.g_y_zl, table.g_y_pl)],
        ModelMode::ThreeD => &[
            (table.g_x_zl, table.g_x_pl),
            (table.g_y_zl, table.g_y_pl),
            (table.g_z_zl, table.g_z_pl),
        ],
    };
    for (j, (&omega, &(g_zl, g_pl))) in freqs.iter().zip(cavity.iter()).enumerate() {
        let (q, p) = (2 * j, 2 * j + 1);
        a[(q, q)] = -0.5 * gamma;
        a[(q, p)] = omega;
        a[(p, q)] = -omega;
        a[(p, p)] = -0.5 * gamma;
        a[(p, zl)] = -2.0 * g_zl;
        a[(p, zl + 1)] = -2.0 * g_pl;
        a[(zl, q)] += 2.0 * g_pl;
        a[(zl + 1, q)] += -2.0 * g_zl;
    }
    // Direct mechanical springs (x–y always; x–z, y–z in 3D).
    let springs: &[(usize, usize, f64)] = match mode {
        ModelMode::TwoD => &[(0, 1, table.g_xy)],
        ModelMode::ThreeD => &[(0, 1, table.g_xy), (0, 2, table.g_xz), (1, 2, table.g_yz)],
    };
    for &(j, l, g) in springs {
        a[(2 * j + 1, 2 * l)] += -2.0 * g;
        a[(2 * l + 1, 2 * j)] += -2.0 * g;
    }
    // Cavity pair.
    a[(zl, zl)] = -0.5 * kappa;
    a[(zl, zl + 1)] = -delta;
    a[(zl + 1, zl)] = delta;
    a[(zl + 1, zl + 1)] = -0.5 * kappa;

    // Noise: thermal + recoil on the mechanics, vacuum on the cavity.
    let mut gain = DMatrix::zeros(dim, dim);
    let mut psd = DVector::zeros(dim);
    let thermal = 2.0 * derived.n_bath + 1.0;
    for j in 0..freqs.len() {
        gain[(2 * j, 2 * j)] = gamma.sqrt();
        gain[(2 * j + 1, 2 * j + 1)] = gamma.sqrt();
        psd[2 * j] = thermal;
        psd[2 * j + 1] = thermal + 2.0 * derived.recoil[j] / gamma;
    }
    gain[(zl, zl)] = kappa.sqrt();
    gain[(zl + 1, zl + 1)] = kappa.sqrt();
    psd[zl] = 1.0;
    psd[zl + 1] = 1.0;

    LinearModel {
        dim,
        drift: a,
        noise_gain: gain,
        noise_psd: psd,
        mode_labels: labels,
    }
}

/// Steady-state covariance V of `ẋ = Ax + noise` with diffusion D, from the
/// Lyapunov equation `AV + VAᵀ + D = 0` solved exactly by Kronecker
/// elimination. The independent frequency-domain integration must reproduce
/// this matrix, which is what the spectral acceptance checks exploit.
///
/// # Errors
///
/// [`Error::Instability`] when A has an eigenvalue with non-negative real
/// part (no steady state exists).
pub fn steady_state_covariance(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!((d.nrows(), d.ncols()), (n, n));
    let max_re = a
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re >= 0.0 {
        return Err(Error::Instability(format!(
            "drift has an eigenvalue with real part {max_re:.6e} >= 0"
        )));
    }
    let eye = DMatrix::<f64>::identity(n, n);
    // vec(AV) = (I ⊗ A) vec(V), vec(VAᵀ) = (A ⊗ I) vec(V) (column stacking).
    let system = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = DVector::from_column_slice(&d.as_slice().iter().map(|v| -v).collect::<Vec<_>>());
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NonConvergence("singular Lyapunov system".into()))?;
    let v = DMatrix::from_column_slice(n, n, solution.as_slice());
    // Symmetrize away round-off.
    Ok(0.5 * (&v + v.transpose()))
}

/// Phonon occupancies of each mechanical mode from a covariance matrix:
/// `n_j = (V_qq + V_pp)/4 − 1/2`.
pub fn covariance_occupancies(model: &LinearModel, v: &DMatrix<f64>) -> Vec<f64> {
    (0..model.mechanical_modes())
        .map(|j| 0.25 * (v[(2 * j, 2 * j)] + v[(2 * j + 1, 2 * j + 1)]) - 0.5)
        .collect()
}

/// Conservative (γ = κ = 0) transverse drift used by the eigenmode-structure
/// analyses and as the reference dynamics for the three-mode identities.
pub fn conservative_drift_2d(
    omega_x: f64,
    omega_y: f64,
    detuning: f64,
    g_x: f64,
    g_y: f64,
) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(6, 6);
    a[(0, 1)] = omega_x;
    a[(1, 0)] = -omega_x;
    a[(1, 4)] = -2.0 * g_x;
    a[(2, 3)] = omega_y;
    a[(3, 2)] = -omega_y;
    a[(3, 4)] = -2.0 * g_y;
    a[(4, 5)] = -detuning;
    a[(5, 4)] = detuning;
    a[(5, 0)] = -2.0 * g_x;
    a[(5, 2)] = -2.0 * g_y;
    a
}

/// The three-mode coupling matrix of the position sector `(x, Z_L, y)`,
/// in its conventional ¼-prefactored form:
///
/// ```text
/// Q = 1/4 · [ ω_x   2g_x   0   ]
///           [ 2g_x  −Δ     2g_y]
///           [ 0     2g_y   ω_y ]
/// ```
///
/// Its eigenstructure organizes the avoided crossing of the two mechanical
/// branches with the cavity branch; see [`three_mode_structure`] for the
/// derived offsets, exact branch frequencies, and eigenvectors.
pub fn three_mode_matrix(
    omega_x: f64,
    omega_y: f64,
    detuning: f64,
    g_x: f64,
    g_y: f64,
) -> Matrix3<f64> {
    0.25 * Matrix3::new(
        omega_x,
        2.0 * g_x,
        0.0, //
        2.0 * g_x,
        -detuning,
        2.0 * g_y, //
        0.0,
        2.0 * g_y,
        omega_y,
    )
}

/// Eigenstructure of the three-mode avoided crossing.
#[derive(Debug, Clone)]
pub struct ThreeModeStructure {
    /// The ¼-prefactored coupling matrix of `(x, Z_L, y)`.
    pub matrix: Matrix3<f64>,
    /// Frequency offsets of the three hybrid branches from their common
    /// center, `2·(eig(Q) − tr(Q)/3)`, ascending. At a degenerate crossing
    /// (`ω_x = ω_y = −Δ`, `g_x = g_y = g`) these are exactly
    /// `{−√2·g, 0, +√2·g}`.
    pub offsets: Vector3<f64>,
    /// Exact hybrid branch frequencies of the conservative dynamics (rad/s),
    /// ascending. Obtained from the identity `M = 4·D·Q`: eliminating the
    /// momenta from the dissipation-free drift gives `v̈ = −M v` with
    /// `D = diag(ω_x, −Δ, ω_y)`, so the squared branch frequencies are the
    /// eigenvalues of the symmetric similar form `D² + 2√D·S·√D` (S the
    /// coupling part of 4Q). This ties the 3×3 picture to the full 6×6 drift
    /// with no rotating-wave approximation.
    pub branch_frequencies: Vector3<f64>,
    /// Eigenvectors of Q as columns in the `(x, Z_L, y)` basis, ascending
    /// eigenvalue, gauged so the first non-negligible component is positive.
    pub vectors: Matrix3<f64>,
    /// Column index of the darkest mode (smallest |Z_L| component).
    pub dark_index: usize,
}

/// Exact conservative branch frequencies from the symmetrized second-order
/// form; requires red detuning (Δ < 0) so the similarity weight is real.
pub fn exact_branch_frequencies(
    omega_x: f64,
    omega_y: f64,
    detuning: f64,
    g_x: f64,
    g_y: f64,
) -> [f64; 3] {
    assert!(
        detuning < 0.0 && omega_x > 0.0 && omega_y > 0.0,
        "symmetrized branch frequencies need a red-detuned, trapped configuration"
    );
    let d = Vector3::new(omega_x, -detuning, omega_y);
    let s = Matrix3::new(
        0.0, g_x, 0.0, //
        g_x, 0.0, g_y, //
        0.0, g_y, 0.0,
    );
    let sqrt_d = Matrix3::from_diagonal(&d.map(f64::sqrt));
    let m_sym = Matrix3::from_diagonal(&d.component_mul(&d)) + 2.0 * sqrt_d * s * sqrt_d;
    let mut lambdas: Vec<f64> = m_sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    lambdas.sort_by(f64::total_cmp);
    [
        lambdas[0].max(0.0).sqrt(),
        lambdas[1].max(0.0).sqrt(),
        lambdas[2].max(0.0).sqrt(),
    ]
}

/// Diagonalize the three-mode matrix and package offsets, exact branch
/// frequencies, and gauged eigenvectors (see [`ThreeModeStructure`]).
pub fn three_mode_structure(
    omega_x: f64,
    omega_y: f64,
    detuning: f64,
    g_x: f64,
    g_y: f64,
) -> ThreeModeStructure {
    let matrix = three_mode_matrix(omega_x, omega_y, detuning, g_x, g_y);
    let eig = matrix.symmetric_eigen();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let trace_third = matrix.trace() / 3.0;
    let offsets = Vector3::from_iterator(
        order
            .iter()
            .map(|&i| 2.0 * (eig.eigenvalues[i] - trace_third)),
    );
    let mut vectors = Matrix3::zeros();
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        // Gauge: first non-negligible component positive.
        if let Some(lead) = (0..3).find(|&r| v[r].abs() > 1e-12) {
            if v[lead] < 0.0 {
                v = -v;
            }
        }
        vectors.set_column(col, &v);
    }
    let dark_index = (0..3).fold(0, |best, c| {
        if vectors[(1, c)].abs() < vectors[(1, best)].abs() {
            c
        } else {
            best
        }
    });
    let branches = exact_branch_frequencies(omega_x, omega_y, detuning, g_x, g_y);
    ThreeModeStructure {
        matrix,
        offsets,
        branch_frequencies: Vector3::from_column_slice(&branches),
        vectors,
        dark_index,
    }
}

/// One eigenmode's trajectory across a detuning sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ModeTrajectory {
    /// Polar angle from the optical axis Z_L (rad), in [0, π].
    pub theta: Vec<f64>,
    /// Azimuth in the mechanical (x, y) plane (rad), in (−π, π].
    pub phi: Vec<f64>,
    /// Eigenfrequency of the conservative hybrid branch (rad/s).
    pub frequency: Vec<f64>,
    /// Squared Z_L content of the unit orientation vector, in [0, 1].
    pub optical_weight: Vec<f64>,
}

/// Eigenmode orientations on the Bloch sphere of `(x, y, Z_L)` content
/// across a detuning sweep, continuity-tracked so each trajectory follows
/// one physical branch through the avoided crossings.
#[derive(Debug, Clone, Serialize)]
pub struct ModeTrajectories {
    /// The detunings swept (rad/s).
    pub detuning_axis: Vec<f64>,
    /// The three tracked branches, initially ascending in frequency.
    pub modes: Vec<ModeTrajectory>,
    /// Smallest successive overlap encountered while tracking; values near 1
    /// mean the sweep was dense enough to follow every branch unambiguously.
    pub min_overlap: f64,
}

/// Eigenvector of `a` for the eigenvalue closest to `lambda`, by shifted
/// inverse iteration with a deterministic start vector.
fn inverse_iteration(a: &DMatrix<Complex64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for attempt in 0..4 {
        // Small shift off the exact eigenvalue keeps the system invertible;
        // enlarged on retry in the (deterministic) event of a bad start.
        let shift = lambda + Complex64::new(1e-10 * scale * 10f64.powi(attempt), 0.0);
        let shifted = a - DMatrix::from_diagonal_element(n, n, shift);
        let lu = shifted.lu();
        let mut v =
            DVector::from_iterator(n, (0..n).map(|i| Complex64::new(1.0, 0.3 + 0.1 * i as f64)));
        v /= Complex64::new(v.norm(), 0.0);
        let mut ok = false;
        for _ in 0..8 {
            let Some(next) = lu.solve(&v) else { break };
            let norm = next.norm();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            v = next / Complex64::new(norm, 0.0);
            let residual = (a * &v - &v * lambda).norm();
            if residual <= 1e-9 * scale {
                ok = true;
                break;
            }
        }
        if ok {
            return Ok(v);
        }
    }
    Err(Error::NonConvergence(format!(
        "inverse iteration failed for eigenvalue {lambda}"
    )))
}

/// Sweep the detuning and track the three conservative eigenmodes of the
/// transverse dynamics on the Bloch sphere of `(x, y, Z_L)` orientation.
///
/// For each detuning the dissipation-free drift (couplings and springs from
/// `table`) is diagonalized; each eigenmode's position-sector components
/// `(x, y, Z_L)` are phase-gauged so the x component is real and
/// non-negative (falling back to the dominant remaining component when the
/// mode has no x content), giving a real unit orientation vector with polar
/// angle θ from Z_L and azimuth φ in the mechanical plane. Branches are
/// matched across neighbouring detunings by greatest overlap.
///
/// # Errors
///
/// [`Error::NonConvergence`] if an eigenvector solve fails or the sweep is
/// too coarse to track branches (successive overlap below 0.5).
pub fn bloch_trajectories(
    derived: &DerivedParams,
    table: &CouplingTable,
    detuning_grid: &[f64],
) -> Result<ModeTrajectories> {
    if detuning_grid.is_empty() {
        return Err(Error::Config("empty detuning grid".into()));
    }
    let g_x = table.g_x_zl.hypot(table.g_x_pl);
    let g_y = table.g_y_zl.hypot(table.g_y_pl);

    let mut modes = vec![
        ModeTrajectory {
            theta: Vec::with_capacity(detuning_grid.len()),
            phi: Vec::with_capacity(detuning_grid.len()),
            frequency: Vec::with_capacity(detuning_grid.len()),
            optical_weight: Vec::with_capacity(detuning_grid.len()),
        };
        3
    ];
    let mut min_overlap = 1.0_f64;
    let mut previous: Option<Vec<DVector<Complex64>>> = None;

    for &delta in detuning_grid {
        let mut drift = conservative_drift_2d(derived.omega_x, derived.omega_y, delta, g_x, g_y);
        // Mechanical springs survive in the conservative skeleton.
        drift[(1, 2)] += -2.0 * table.g_xy;
        drift[(3, 0)] += -2.0 * table.g_xy;
        let a_c = drift.map(|v| Complex64::new(v, 0.0));

        // The three positive-frequency eigenvalues.
        let mut eigs: Vec<Complex64> = drift
            .complex_eigenvalues()
            .iter()
            .copied()
            .filter(|l| l.im > 0.0)
            .collect();
        if eigs.len() != 3 {
            return Err(Error::NonConvergence(format!(
                "expected 3 positive-frequency branches at detuning {delta:.3e}, found {}",
                eigs.len()
            )));
        }
        eigs.sort_by(|a, b| a.im.total_cmp(&b.im));

        // Gauged position-sector orientation of each branch.
        let mut orientations: Vec<DVector<Complex64>> = Vec::with_capacity(3);
        let mut freqs: Vec<f64> = Vec::with_capacity(3);
        for &lambda in &eigs {
            let v = inverse_iteration(&a_c, lambda)?;
            let mut c = DVector::from_column_slice(&[v[0], v[2], v[4]]);
            let norm = c.norm();
            if norm == 0.0 {
                return Err(Error::NonConvergence(
                    "eigenmode has no position-sector content".into(),
                ));
            }
            c /= Complex64::new(norm, 0.0);
            // Phase gauge on the x content when present, else on the larger
            // of the remaining components; for a conservative drift the gauged
            // position sector is real up to round-off.
            let anchor = if c[0].norm() > 0.1 {
                c[0]
            } else if c[1].norm() >= c[2].norm() {
                c[1]
            } else {
                c[2]
            };
            let phase = anchor / Complex64::new(anchor.norm().max(f64::MIN_POSITIVE), 0.0);
            c /= phase;
            orientations.push(c);
            freqs.push(lambda.im);
        }

        // Track branches by overlap with the previous detuning point.
        let order: [usize; 3] = match &previous {
            None => [0, 1, 2],
            Some(prev) => {
                let mut taken = [false; 3];
                let mut order = [0usize; 3];
                for (slot, p) in prev.iter().enumerate() {
                    let (mut best, mut best_ov) = (usize::MAX, -1.0);
                    for (i, c) in orientations.iter().enumerate() {
                        if taken[i] {
                            continue;
                        }
                        let ov = p.dotc(c).norm();
                        if ov > best_ov {
                            best_ov = ov;
                            best = i;
                        }
                    }
                    min_overlap = min_overlap.min(best_ov);
                    taken[best] = true;
                    order[slot] = best;
                }
                order
            }
        };
        if min_overlap < 0.5 {
            return Err(Error::NonConvergence(format!(
                "eigenmode tracking lost near detuning {delta:.6e} (overlap {min_overlap:.3}); \
                 refine the detuning grid"
            )));
        }

        let mut reordered = Vec::with_capacity(3);
        for (slot, &i) in order.iter().enumerate() {
            let c = &orientations[i];
            let r = [c[0].re, c[1].re, c[2].re];
            let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            let r = [r[0] / norm, r[1] / norm, r[2] / norm];
            modes[slot].theta.push(r[2].clamp(-1.0, 1.0).acos());
            modes[slot].phi.push(r[1].atan2(r[0]));
            modes[slot].frequency.push(freqs[i]);
            modes[slot].optical_weight.push(r[2] * r[2]);
            reordered.push(c.clone());
        }
        previous = Some(reordered);
    }

    Ok(ModeTrajectories {
        detuning_axis: detuning_grid.to_vec(),
        modes,
        min_overlap,
    })
}
