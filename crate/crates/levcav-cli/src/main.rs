//! Command-line front end for the levcav toolkit.
//!
//! Every capability of the library is reachable from one binary: parameter
//! derivation, hybrid eigenmode structure, exact spectra, occupancy
//! reports, bright/dark analysis, the coupling window, and rectangular
//! parameter scans. Artifacts are written to `--out` as CSV (grids,
//! spectra, trajectories) or JSON (scalar reports); a status line per
//! artifact goes to stdout.
//!
//! Exit codes: 0 on success, 1 on configuration or usage errors, 2 on
//! numerical non-convergence, 3 when the linearized dynamics are unstable
//! at a requested single operating point. Identical configuration and seed
//! produce byte-identical artifacts for any `--threads` value.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use levcav::brightdark::{expanded_hybrid_couplings, geometric_transform, nongeometric_transform};
use levcav::equilibrium::coupling_table;
use levcav::model::{bloch_trajectories, three_mode_structure, ModelMode};
use levcav::scan::{bright_dark_crossing_config, derive_with_mean_detuning};
use levcav::spectra::SpectrumGrid;
use levcav::{
    cooling_rates, derive_params, goldilocks_bounds, qlt_occupancies, run_scan,
    scan_detuning_spectra, BrightDarkParams, CoolingRates, DetuningRule, Error, ExperimentConfig,
    Result, ScanOutputs, ScanSpec,
};

const TAU: f64 = std::f64::consts::TAU;

/// Points in the default eigenmode detuning sweep.
const DEFAULT_EIGENMODE_POINTS: usize = 201;

#[derive(Parser)]
#[command(
    name = "levcav",
    version,
    about = "2D cavity cooling of a levitated nanoparticle: derived rates, exact spectra, \
             occupancies, bright/dark analysis, and parameter scans"
)]
struct Cli {
    /// Experiment configuration (JSON), required by every subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory artifacts are written to.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Model dimensionality: transverse only, or with the axial mode.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::TwoD)]
    mode: ModeArg,

    /// Seed recorded in scan provenance (the pipelines are deterministic
    /// and consume no randomness).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Transverse x and y plus the cavity.
    #[value(name = "2d")]
    TwoD,
    /// Transverse plus axial motion.
    #[value(name = "3d")]
    ThreeD,
}

impl From<ModeArg> for ModelMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::TwoD => ModelMode::TwoD,
            ModeArg::ThreeD => ModelMode::ThreeD,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Derive every physical rate from the configuration (derive.json).
    Derive,

    /// Hybrid three-mode structure at the configured detuning plus
    /// Bloch-sphere eigenmode trajectories across a detuning sweep
    /// (eigenmodes.json, eigenmodes.csv).
    Eigenmodes {
        /// Detuning sweep as min:max:points (rad/s, red side is negative).
        /// Defaults to 201 points bracketing both mechanical crossings.
        #[arg(long, value_name = "MIN:MAX:POINTS", allow_hyphen_values = true)]
        detunings: Option<String>,
    },

    /// Exact displacement and heterodyne spectra at the configured
    /// operating point (spectrum.csv), or a stack across detunings
    /// (detuning_spectra.csv, detuning_branches.csv).
    Spectrum {
        /// Compute a spectrum per detuning of min:max:points (rad/s)
        /// instead of a single operating point.
        #[arg(long, value_name = "MIN:MAX:POINTS", allow_hyphen_values = true)]
        detunings: Option<String>,

        /// First rescale the configuration to the narrowed-cavity,
        /// quarter-split variant (κ→κ/10, trap split→split/4) that resolves
        /// the bright/dark avoided crossing.
        #[arg(long)]
        crossing: bool,
    },

    /// Steady-state phonon occupancies and heterodyne readback
    /// (occupancy.json).
    Occupancy,

    /// Bright/dark transforms, hybrid cooling rates, and the thermometry
    /// rate ratio (brightdark.json).
    Brightdark,

    /// Rectangular parameter scan (scan.csv).
    Scan {
        /// Outer axis, e.g. waist_x:0.5e-6:0.8e-6:60.
        #[arg(long, value_name = "NAME:MIN:MAX:POINTS")]
        axis1: String,

        /// Inner axis, e.g. waist_y:0.5e-6:0.8e-6:60.
        #[arg(long, value_name = "NAME:MIN:MAX:POINTS")]
        axis2: String,

        /// Add per-mode cooling-rate columns.
        #[arg(long)]
        rates: bool,

        /// Add mean-coupling and window-bound columns.
        #[arg(long)]
        bounds: bool,

        /// Keep the configured detuning in every cell instead of
        /// re-centering −Δ on the mean trap frequency per cell.
        #[arg(long)]
        fixed_detuning: bool,
    },

    /// Coupling-window bounds at the configured operating point
    /// (goldilocks.json).
    Goldilocks,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and succeed; real
            // usage errors are configuration errors.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 1,
                Error::NonConvergence(_) => 2,
                Error::Instability(_) => 3,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))?;
    }
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config <PATH> is required".into()))?;
    let config = ExperimentConfig::from_path(config_path)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| {
        Error::Config(format!(
            "cannot create output directory {}: {e}",
            cli.out.display()
        ))
    })?;
    let mode = cli.mode.into();

    match cli.command {
        Command::Derive => cmd_derive(&cli.out, &config),
        Command::Eigenmodes { detunings } => cmd_eigenmodes(&cli.out, &config, detunings),
        Command::Spectrum {
            detunings,
            crossing,
        } => cmd_spectrum(&cli.out, &config, mode, detunings, crossing),
        Command::Occupancy => cmd_occupancy(&cli.out, &config, mode),
        Command::Brightdark => cmd_brightdark(&cli.out, &config),
        Command::Scan {
            axis1,
            axis2,
            rates,
            bounds,
            fixed_detuning,
        } => cmd_scan(
            &cli.out,
            config,
            mode,
            cli.seed,
            &axis1,
            &axis2,
            ScanOutputs { rates, bounds },
            fixed_detuning,
        ),
        Command::Goldilocks => cmd_goldilocks(&cli.out, &config),
    }
}

fn cmd_derive(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let derived = derive_params(config)?;
    let path = out.join("derive.json");
    write_json(&path, &derived)?;
    println!(
        "trap (omega_x, omega_y)/2pi = ({:.6e}, {:.6e}) Hz, couplings (g_x, g_y)/2pi = \
         ({:.6e}, {:.6e}) Hz",
        derived.omega_x / TAU,
        derived.omega_y / TAU,
        derived.g_x / TAU,
        derived.g_y / TAU
    );
    println!("derived parameters -> {}", path.display());
    Ok(())
}

/// Scalar summary of the three-mode hybrid structure, with the eigenmode
/// orientation columns in the `(x, Z_L, y)` basis.
#[derive(Serialize)]
struct EigenmodeReport {
    detuning_hz: f64,
    branch_frequencies_hz: [f64; 3],
    branch_offsets_hz: [f64; 3],
    dark_index: usize,
    orientation_vectors: [[f64; 3]; 3],
    sweep_min_overlap: f64,
}

fn cmd_eigenmodes(out: &Path, config: &ExperimentConfig, detunings: Option<String>) -> Result<()> {
    if config.detuning >= 0.0 {
        return Err(Error::Config(
            "the hybrid mode structure needs a red-detuned drive (detuning < 0)".into(),
        ));
    }
    let derived = derive_params(config)?;
    let table = coupling_table(&derived, derived.xi);
    let g_x = table.g_x_zl.hypot(table.g_x_pl);
    let g_y = table.g_y_zl.hypot(table.g_y_pl);
    let structure =
        three_mode_structure(derived.omega_x, derived.omega_y, config.detuning, g_x, g_y);

    let grid = match detunings {
        Some(spec) => {
            let grid = parse_linspace(&spec, "--detunings")?;
            if grid.iter().any(|&d| d >= 0.0) {
                return Err(Error::Config(
                    "--detunings must stay on the red side (all values negative)".into(),
                ));
            }
            grid
        }
        None => {
            let hi = 1.5 * derived.omega_x.max(derived.omega_y);
            let lo = 0.5 * derived.omega_x.min(derived.omega_y);
            linspace(-hi, -lo, DEFAULT_EIGENMODE_POINTS)
        }
    };
    let trajectories = bloch_trajectories(&derived, &table, &grid)?;

    let column = |i: usize| -> [f64; 3] {
        let c = structure.vectors.column(i);
        [c[0], c[1], c[2]]
    };
    let report = EigenmodeReport {
        detuning_hz: config.detuning / TAU,
        branch_frequencies_hz: [
            structure.branch_frequencies[0] / TAU,
            structure.branch_frequencies[1] / TAU,
            structure.branch_frequencies[2] / TAU,
        ],
        branch_offsets_hz: [
            structure.offsets[0] / TAU,
            structure.offsets[1] / TAU,
            structure.offsets[2] / TAU,
        ],
        dark_index: structure.dark_index,
        orientation_vectors: [column(0), column(1), column(2)],
        sweep_min_overlap: trajectories.min_overlap,
    };
    let json_path = out.join("eigenmodes.json");
    write_json(&json_path, &report)?;

    let mut csv = String::new();
    let _ = writeln!(csv, "# levcav eigenmode trajectories");
    let _ = writeln!(csv, "# version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(csv, "# min_overlap={:.16e}", trajectories.min_overlap);
    let _ = writeln!(
        csv,
        "detuning_hz,mode,theta_rad,phi_rad,frequency_hz,optical_weight"
    );
    for (index, mode) in trajectories.modes.iter().enumerate() {
        for (i, &detuning) in trajectories.detuning_axis.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{:.16e},{index},{:.16e},{:.16e},{:.16e},{:.16e}",
                detuning / TAU,
                mode.theta[i],
                mode.phi[i],
                mode.frequency[i] / TAU,
                mode.optical_weight[i]
            );
        }
    }
    let csv_path = out.join("eigenmodes.csv");
    write_text(&csv_path, &csv)?;
    println!(
        "three-mode structure (dark branch {}) -> {}",
        structure.dark_index,
        json_path.display()
    );
    println!(
        "{} modes x {} detunings -> {}",
        trajectories.modes.len(),
        trajectories.detuning_axis.len(),
        csv_path.display()
    );
    Ok(())
}

fn cmd_spectrum(
    out: &Path,
    config: &ExperimentConfig,
    mode: ModelMode,
    detunings: Option<String>,
    crossing: bool,
) -> Result<()> {
    let config = if crossing {
        bright_dark_crossing_config(config)?
    } else {
        config.clone()
    };
    match detunings {
        None => {
            let derived = derive_params(&config)?;
            let (spectrum, report) = qlt_occupancies(&derived, mode, true)?;
            let path = out.join("spectrum.csv");
            write_text(&path, &spectrum_csv(&spectrum))?;
            println!(
                "n_2d = {:.4} on {} frequency points -> {}",
                report.n_2d,
                spectrum.omega.len(),
                path.display()
            );
        }
        Some(spec) => {
            let grid = parse_linspace(&spec, "--detunings")?;
            let stack = scan_detuning_spectra(&config, &grid)?;
            let spectra_path = out.join("detuning_spectra.csv");
            write_text(&spectra_path, &stack.to_spectra_csv())?;
            let branches_path = out.join("detuning_branches.csv");
            write_text(&branches_path, &stack.to_branch_csv())?;
            println!(
                "{} detunings x {} frequency points -> {}",
                stack.rows.len(),
                stack.omega.len(),
                spectra_path.display()
            );
            println!("eigenbranch overlay -> {}", branches_path.display());
        }
    }
    Ok(())
}

fn cmd_occupancy(out: &Path, config: &ExperimentConfig, mode: ModelMode) -> Result<()> {
    let derived = derive_params(config)?;
    let (_, report) = qlt_occupancies(&derived, mode, true)?;
    let path = out.join("occupancy.json");
    write_json(&path, &report)?;
    println!(
        "n_x = {:.4}, n_y = {:.4}, n_2d = {:.4}{}",
        report.n_x,
        report.n_y,
        report.n_2d,
        report
            .n_het
            .map(|n| format!(", heterodyne readback n = {n:.4}"))
            .unwrap_or_default()
    );
    println!("occupancy report -> {}", path.display());
    Ok(())
}

/// Bright/dark analysis at the configured operating point: both canonical
/// transforms, the printed first-order hybrid couplings, cooling rates, and
/// the rate ratio that gates bright-mode thermometry.
#[derive(Serialize)]
struct BrightDarkReport {
    geometric: BrightDarkParams,
    nongeometric: BrightDarkParams,
    expanded_g_b: f64,
    expanded_g_bd: f64,
    rates_geometric: CoolingRates,
    rates_nongeometric: CoolingRates,
    inference_gamma_b: f64,
    inference_gamma_d: f64,
    rate_ratio: Option<f64>,
}

fn cmd_brightdark(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let derived = derive_params(config)?;
    let geometric = geometric_transform(derived.omega_x, derived.omega_y, derived.g_x, derived.g_y);
    let nongeometric =
        nongeometric_transform(derived.omega_x, derived.omega_y, derived.g_x, derived.g_y);
    let (expanded_g_b, expanded_g_bd) =
        expanded_hybrid_couplings(derived.omega_x, derived.omega_y, derived.g_x, derived.g_y);
    let rates_geometric = cooling_rates(&derived, &geometric);
    let rates_nongeometric = cooling_rates(&derived, &nongeometric);
    let (inference_gamma_b, inference_gamma_d) = rates_nongeometric.inference_rates();
    let report = BrightDarkReport {
        geometric,
        nongeometric,
        expanded_g_b,
        expanded_g_bd,
        rates_geometric,
        rates_nongeometric,
        inference_gamma_b,
        inference_gamma_d,
        rate_ratio: (inference_gamma_d != 0.0).then(|| inference_gamma_b / inference_gamma_d),
    };
    let path = out.join("brightdark.json");
    write_json(&path, &report)?;
    println!(
        "bright mode (omega_b, g_b)/2pi = ({:.6e}, {:.6e}) Hz, rate ratio {}",
        nongeometric.omega_b / TAU,
        nongeometric.g_b / TAU,
        report
            .rate_ratio
            .map(|r| format!("{r:.3}"))
            .unwrap_or_else(|| "undefined".into())
    );
    println!("bright/dark report -> {}", path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    out: &Path,
    base: ExperimentConfig,
    mode: ModelMode,
    seed: u64,
    axis1: &str,
    axis2: &str,
    outputs: ScanOutputs,
    fixed_detuning: bool,
) -> Result<()> {
    let spec = ScanSpec {
        axis1: axis1.parse()?,
        axis2: axis2.parse()?,
        base,
        mode,
        detuning_rule: if fixed_detuning {
            DetuningRule::Fixed
        } else {
            DetuningRule::MeanTrap
        },
        outputs,
        seed,
    };
    let result = run_scan(&spec)?;
    let stable = result.cells.iter().filter(|c| c.stable).count();
    let converged = result.cells.iter().filter(|c| c.converged).count();
    let path = out.join("scan.csv");
    write_text(&path, &result.to_csv())?;
    println!(
        "{} cells ({stable} stable, {converged} converged) -> {}",
        result.cells.len(),
        path.display()
    );
    Ok(())
}

/// The coupling window at the configured operating point, plus where the
/// actual mean coupling falls relative to it.
#[derive(Serialize)]
struct GoldilocksReport {
    g_min_hz: f64,
    g_max_hz: f64,
    empty: bool,
    g_mean_hz: f64,
    g_mean_in_zone: bool,
    kappa_hz: f64,
    heating_rate_hz: f64,
    frequency_split_hz: f64,
}

fn cmd_goldilocks(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let derived = derive_with_mean_detuning(config)?;
    let split = (derived.omega_y - derived.omega_x).abs();
    let zone = goldilocks_bounds(derived.config.kappa, derived.gamma_heat, split);
    let g_mean = derived.mean_coupling();
    let report = GoldilocksReport {
        g_min_hz: zone.g_min / TAU,
        g_max_hz: zone.g_max / TAU,
        empty: zone.empty,
        g_mean_hz: g_mean / TAU,
        g_mean_in_zone: zone.contains(g_mean),
        kappa_hz: derived.config.kappa / TAU,
        heating_rate_hz: derived.gamma_heat / TAU,
        frequency_split_hz: split / TAU,
    };
    let path = out.join("goldilocks.json");
    write_json(&path, &report)?;
    println!(
        "window g/2pi in [{:.4e}, {:.4e}] Hz ({}), mean coupling {:.4e} Hz ({})",
        report.g_min_hz,
        report.g_max_hz,
        if report.empty { "closed" } else { "open" },
        report.g_mean_hz,
        if report.g_mean_in_zone {
            "inside"
        } else {
            "outside"
        }
    );
    println!("coupling window -> {}", path.display());
    Ok(())
}

/// Renders a spectrum as CSV: the frequency axis in Hz followed by every
/// stored array, in stored order.
fn spectrum_csv(spectrum: &SpectrumGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# levcav spectrum");
    let _ = writeln!(out, "# version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# points={}", spectrum.meta.points);
    if let Some(oversample) = spectrum.meta.oversample {
        let _ = writeln!(out, "# oversample={oversample}");
    }
    if let Some(change) = spectrum.meta.relative_change {
        let _ = writeln!(out, "# relative_change={change:.3e}");
    }
    if spectrum.meta.lo_overlap_warning {
        let _ = writeln!(out, "# warning=lo_offset within 4x the system band");
    }
    let mut header = String::from("omega_hz");
    for (name, _) in &spectrum.values {
        let _ = write!(header, ",{name}");
    }
    let _ = writeln!(out, "{header}");
    for (i, &omega) in spectrum.omega.iter().enumerate() {
        let _ = write!(out, "{:.16e}", omega / TAU);
        for (_, array) in &spectrum.values {
            let _ = write!(out, ",{:.16e}", array[i]);
        }
        out.push('\n');
    }
    out
}

/// Parses `min:max:points` into a linear grid (configuration units).
fn parse_linspace(spec: &str, flag: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [min, max, points] = parts[..] else {
        return Err(Error::Config(format!(
            "{flag} must have the form min:max:points, got `{spec}`"
        )));
    };
    let number = |text: &str| -> Result<f64> {
        text.parse()
            .map_err(|_| Error::Config(format!("{flag}: `{text}` is not a number")))
    };
    let (min, max) = (number(min)?, number(max)?);
    let points: usize = points
        .parse()
        .map_err(|_| Error::Config(format!("{flag}: `{points}` is not a point count")))?;
    if !(min.is_finite() && max.is_finite()) || min >= max || points < 2 {
        return Err(Error::Config(format!(
            "{flag} needs finite min < max and at least 2 points, got `{spec}`"
        )));
    }
    Ok(linspace(min, max, points))
}

fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    let step = (max - min) / (points - 1) as f64;
    (0..points).map(|i| min + step * i as f64).collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}
