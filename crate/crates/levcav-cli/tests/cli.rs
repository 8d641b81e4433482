//! End-to-end tests of the `levcav` binary: artifact layout, exit codes,
//! and determinism across thread counts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use levcav::ExperimentConfig;
use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_levcav")
}

/// Fresh working directory for one test, with the stock example
/// configuration written into it.
fn workdir(name: &str) -> (PathBuf, PathBuf) {
    let dir = std::env::temp_dir().join(format!("levcav-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("config.json");
    let text = serde_json::to_string_pretty(&ExperimentConfig::example()).unwrap();
    std::fs::write(&config, text).unwrap();
    (dir, config)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn read_json(path: &Path) -> Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

/// Lines of a CSV artifact split into comments and content rows.
fn read_csv(path: &Path) -> (Vec<String>, Vec<String>) {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') {
            comments.push(line.to_string());
        } else {
            rows.push(line.to_string());
        }
    }
    (comments, rows)
}

#[test]
fn derive_writes_the_rate_report() {
    let (dir, config) = workdir("derive");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "derive",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = read_json(&dir.join("derive.json"));
    for key in ["omega_x", "omega_y", "g_x", "g_y", "n_bath", "gamma_gas"] {
        assert!(
            report.get(key).and_then(Value::as_f64).is_some(),
            "derive.json is missing `{key}`"
        );
    }
    assert!(report["omega_x"].as_f64().unwrap() > 0.0);
}

#[test]
fn configuration_errors_exit_one_and_name_the_problem() {
    let (dir, config) = workdir("config-errors");
    let out_dir = dir.to_str().unwrap();

    // Missing file: the message names the path.
    let missing = dir.join("nope.json");
    let out = run(&[
        "--config",
        missing.to_str().unwrap(),
        "--out",
        out_dir,
        "derive",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nope.json"), "stderr: {stderr}");

    // Malformed JSON.
    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{").unwrap();
    let out = run(&[
        "--config",
        broken.to_str().unwrap(),
        "--out",
        out_dir,
        "derive",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Unknown key: the message names the key.
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(&config).unwrap()).unwrap();
    cfg["florp"] = Value::from(1.0);
    let unknown = dir.join("unknown.json");
    std::fs::write(&unknown, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = run(&[
        "--config",
        unknown.to_str().unwrap(),
        "--out",
        out_dir,
        "derive",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("florp"), "stderr: {stderr}");

    // No --config at all is a usage error, not a crash.
    let out = run(&["--out", out_dir, "derive"]);
    assert_eq!(out.status.code(), Some(1));

    // Help succeeds.
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unstable_operating_point_exits_three() {
    let (dir, config) = workdir("unstable");
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(&config).unwrap()).unwrap();
    // Blue detuning anti-damps the motion; the steady state does not exist.
    cfg["detuning"] = Value::from(1.9611e6);
    std::fs::write(&config, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "occupancy",
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unstable"), "stderr: {stderr}");
}

#[test]
fn scan_writes_a_complete_grid() {
    let (dir, config) = workdir("scan");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "scan",
        "--axis1",
        "waist_x:5.5e-7:6.5e-7:2",
        "--axis2",
        "waist_y:6.5e-7:7.5e-7:2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let (comments, rows) = read_csv(&dir.join("scan.csv"));
    assert!(comments.iter().any(|c| c.contains("config_sha256=")));
    assert!(comments.iter().any(|c| c.contains("seed=0")));
    assert_eq!(
        rows[0],
        "waist_x_m,waist_y_m,detuning_hz,omega_x_hz,omega_y_hz,g_x_hz,g_y_hz,\
         n_x,n_y,n_2d,stable,converged"
    );
    assert_eq!(rows.len(), 1 + 4, "2x2 scan must emit exactly four cells");
    for row in &rows[1..] {
        assert!(row.ends_with("true,true"), "cell not resolved: {row}");
    }
}

#[test]
fn scan_output_does_not_depend_on_thread_count() {
    let (dir, config) = workdir("scan-threads");
    let mut artifacts = Vec::new();
    for threads in ["1", "4"] {
        let out_dir = dir.join(format!("t{threads}"));
        std::fs::create_dir_all(&out_dir).unwrap();
        let out = run(&[
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--threads",
            threads,
            "--seed",
            "7",
            "scan",
            "--axis1",
            "waist_x:5.5e-7:6.5e-7:3",
            "--axis2",
            "waist_y:6.5e-7:7.5e-7:3",
            "--rates",
            "--bounds",
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        artifacts.push(std::fs::read(out_dir.join("scan.csv")).unwrap());
    }
    assert_eq!(
        artifacts[0], artifacts[1],
        "scan.csv must be byte-identical for 1 and 4 threads"
    );
    let text = String::from_utf8(artifacts[0].clone()).unwrap();
    assert!(text.lines().any(|l| l.contains("seed=7")));
}

#[test]
fn eigenmodes_writes_structure_and_trajectories() {
    let (dir, config) = workdir("eigenmodes");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "eigenmodes",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = read_json(&dir.join("eigenmodes.json"));
    let dark = report["dark_index"].as_u64().unwrap();
    assert!(dark < 3);
    assert!(report["sweep_min_overlap"].as_f64().unwrap() > 0.9);
    assert_eq!(report["branch_frequencies_hz"].as_array().unwrap().len(), 3);
    let (_, rows) = read_csv(&dir.join("eigenmodes.csv"));
    assert_eq!(
        rows[0],
        "detuning_hz,mode,theta_rad,phi_rad,frequency_hz,optical_weight"
    );
    assert_eq!(rows.len(), 1 + 3 * 201, "3 modes x 201 default detunings");
}

#[test]
fn brightdark_and_goldilocks_reports_are_consistent() {
    let (dir, config) = workdir("brightdark");
    let dir_str = dir.to_str().unwrap();
    let cfg_str = config.to_str().unwrap();

    let out = run(&["--config", cfg_str, "--out", dir_str, "brightdark"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = read_json(&dir.join("brightdark.json"));
    let g_b = report["nongeometric"]["g_b"].as_f64().unwrap();
    let g_bd = report["nongeometric"]["g_bd"].as_f64().unwrap();
    assert!(g_b > 0.0 && g_bd > 0.0);
    let ratio = report["rate_ratio"].as_f64().unwrap();
    let inferred = report["inference_gamma_b"].as_f64().unwrap()
        / report["inference_gamma_d"].as_f64().unwrap();
    assert!((ratio - inferred).abs() <= 1e-12 * ratio.abs());

    let out = run(&["--config", cfg_str, "--out", dir_str, "goldilocks"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let zone = read_json(&dir.join("goldilocks.json"));
    let g_min = zone["g_min_hz"].as_f64().unwrap();
    let g_max = zone["g_max_hz"].as_f64().unwrap();
    assert!(g_min > 0.0);
    assert_eq!(zone["empty"].as_bool().unwrap(), g_min >= g_max);
    let g_mean = zone["g_mean_hz"].as_f64().unwrap();
    assert_eq!(
        zone["g_mean_in_zone"].as_bool().unwrap(),
        g_min <= g_mean && g_mean <= g_max
    );
}

#[test]
fn spectrum_writes_single_point_and_detuning_stack() {
    let (dir, config) = workdir("spectrum");
    let dir_str = dir.to_str().unwrap();
    let cfg_str = config.to_str().unwrap();

    let out = run(&["--config", cfg_str, "--out", dir_str, "spectrum"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let (_, rows) = read_csv(&dir.join("spectrum.csv"));
    assert_eq!(
        rows[0],
        "omega_hz,s_xx,s_pxpx,s_yy,s_pypy,s_het,s_het_rescaled,s_xbxb"
    );
    assert!(rows.len() > 100, "spectrum should resolve every resonance");

    let out = run(&[
        "--config",
        cfg_str,
        "--out",
        dir_str,
        "spectrum",
        "--crossing",
        "--detunings",
        "-2.2e6:-1.7e6:3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let (_, brows) = read_csv(&dir.join("detuning_branches.csv"));
    assert_eq!(
        brows[0],
        "detuning_hz,branch,frequency_hz,linewidth_hz,n_2d,stable,converged"
    );
    assert_eq!(brows.len(), 1 + 3 * 3, "three branches per detuning");
    let (_, srows) = read_csv(&dir.join("detuning_spectra.csv"));
    assert_eq!(srows[0], "detuning_hz,omega_hz,s_het,s_het_rescaled");
    // Long format: each detuning contributes one row per shared frequency.
    assert_eq!((srows.len() - 1) % 3, 0);
    assert!(srows.len() > 3 * 100);
}
