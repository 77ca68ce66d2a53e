//! Black-box tests of the command-line contract: configuration sources and their
//! precedence, seed resolution, exit codes, and the artifact set each format
//! selection produces. Every run here is deliberately tiny — these tests pin the
//! interface, not the physics.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cavcool() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cavcool"));
    // the ambient environment must not leak a seed into these fixtures
    cmd.env_remove("CAVCOOL_SEED");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary should spawn")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).expect("config should be writable");
    path
}

/// A complete, cheap configuration: 2 trajectories over 5 κ⁻¹.
const SMALL_CONFIG: &str = r#"{
  "n_atoms": 1,
  "u0": -0.5,
  "gamma": 0.001,
  "delta": [-1.0],
  "kappa": [1.0],
  "eta": [3.0],
  "kappa_over_omega_r": 415.0,
  "dt": 0.001,
  "t_final": 5.0,
  "trajectories": 2,
  "formats": ["csv", "json"]
}"#;

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let out = run(cavcool().arg(flag));
        assert_eq!(out.status.code(), Some(0), "{flag} should succeed");
    }
    let out = run(cavcool().args(["run", "--help"]));
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--preset"));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = run(cavcool().args(["run", "--preset", "bogus"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn incomplete_flag_set_lists_every_missing_flag() {
    let out = run(cavcool().args(["run", "--u0", "-0.5", "--dt", "0.001"]));
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_text(&out);
    for flag in [
        "--n-atoms",
        "--gamma",
        "--delta",
        "--eta",
        "--kappa-over-omega-r",
        "--t-final",
        "--trajectories",
    ] {
        assert!(err.contains(flag), "stderr should name {flag}: {err}");
    }
    // the flags that were given must not be reported
    assert!(!err.contains("--u0"));
    assert!(!err.contains("--dt"));
}

#[test]
fn preset_conflicts_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_CONFIG);
    let out = run(cavcool()
        .args(["run", "--preset", "fig1", "--config"])
        .arg(&config));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_unknown_keys_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{"n_atoms": 1, "zeta": 1, "beta": 2}"#,
    );
    let out = run(cavcool().args(["run", "--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_text(&out);
    assert!(err.contains("unknown config keys"), "{err}");
    assert!(err.contains("beta, zeta"), "keys should be sorted: {err}");
}

#[test]
fn config_file_missing_keys_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "empty.json", r#"{"n_atoms": 1}"#);
    let out = run(cavcool().args(["run", "--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_text(&out);
    assert!(err.contains("missing required config keys"), "{err}");
    for key in ["u0", "gamma", "delta", "eta", "dt", "t_final", "trajectories"] {
        assert!(err.contains(key), "stderr should name {key}: {err}");
    }
    assert!(!err.contains("n_atoms,"), "present keys must not be listed: {err}");
}

#[test]
fn config_file_must_be_a_json_object() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "list.json", "[1, 2]");
    let out = run(cavcool().args(["run", "--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("JSON object"));
}

fn summary_value(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("summary.json")).expect("summary.json");
    serde_json::from_str(&text).expect("summary should be valid JSON")
}

#[test]
fn env_seed_fills_in_when_no_flag_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(cavcool()
        .args(["run", "--preset", "fig3", "--predict-only", "--out"])
        .arg(dir.path())
        .env("CAVCOOL_SEED", "42"));
    assert_eq!(out.status.code(), Some(0));
    let summary = summary_value(dir.path());
    assert_eq!(summary["config"]["seed"], serde_json::json!(42));
    assert_eq!(summary["status"], "predict_only");
}

#[test]
fn seed_flag_overrides_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(cavcool()
        .args(["run", "--preset", "fig3", "--predict-only", "--seed", "7", "--out"])
        .arg(dir.path())
        .env("CAVCOOL_SEED", "42"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary_value(dir.path())["config"]["seed"], serde_json::json!(7));
}

#[test]
fn malformed_env_seed_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(cavcool()
        .args(["run", "--preset", "fig3", "--predict-only", "--out"])
        .arg(dir.path())
        .env("CAVCOOL_SEED", "banana"));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("CAVCOOL_SEED"));
}

#[test]
fn predict_only_writes_a_summary_and_nothing_else() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(cavcool()
        .args(["run", "--preset", "ring", "--predict-only", "--out"])
        .arg(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let summary = summary_value(dir.path());
    assert_eq!(summary["status"], "predict_only");
    assert!(summary["predictions"].is_object(), "predictions block expected");
    assert!(!dir.path().join("series.csv").exists());
    assert!(!dir.path().join("plot.svg").exists());
}

#[test]
fn formats_select_exactly_the_requested_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_CONFIG);

    let csv_dir = dir.path().join("csv_only");
    let out = run(cavcool()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--seed", "1", "--formats", "csv", "--out"])
        .arg(&csv_dir));
    // 5 κ⁻¹ shows no decay; exit 2 is the expected verdict for these fixtures
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
    assert!(csv_dir.join("series.csv").exists());
    assert!(!csv_dir.join("summary.json").exists());
    assert!(!csv_dir.join("plot.svg").exists());

    let rich_dir = dir.path().join("json_svg");
    let out = run(cavcool()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--seed", "1", "--formats", "json,svg", "--out"])
        .arg(&rich_dir));
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
    assert!(!rich_dir.join("series.csv").exists());
    assert!(rich_dir.join("summary.json").exists());
    let svg = std::fs::read_to_string(rich_dir.join("plot.svg")).expect("plot.svg");
    assert!(svg.starts_with("<svg"), "plot should be an SVG document");
}

#[test]
fn reruns_with_one_seed_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_CONFIG);
    let mut series = Vec::new();
    let mut summaries = Vec::new();
    for name in ["first", "second"] {
        let out_dir = dir.path().join(name);
        let out = run(cavcool()
            .args(["run", "--config"])
            .arg(&config)
            .args(["--seed", "9", "--out"])
            .arg(&out_dir));
        assert!(matches!(out.status.code(), Some(0) | Some(2)));
        series.push(std::fs::read(out_dir.join("series.csv")).unwrap());
        summaries.push(std::fs::read_to_string(out_dir.join("summary.json")).unwrap());
    }
    assert_eq!(series[0], series[1], "series.csv must be byte-identical");
    // the summary repeats exactly except for the wall-clock measurement and the
    // echo of the (per-run) output directory
    let strip = |text: &str| -> String {
        text.lines()
            .filter(|line| !line.contains("wall_clock_seconds") && !line.contains("out_dir"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&summaries[0]), strip(&summaries[1]));
    assert_ne!(summaries[0].find("wall_clock_seconds"), None);
}

#[test]
fn unstable_step_size_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(cavcool()
        .args([
            "run", "--n-atoms", "1", "--u0", "-0.5", "--gamma", "0.001", "--delta",
            "-1", "--eta", "10", "--kappa-over-omega-r", "415", "--dt", "5",
            "--t-final", "50", "--trajectories", "4", "--seed", "1", "--formats",
            "csv", "--out",
        ])
        .arg(dir.path()));
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_text(&out).contains("diverged"));
}

#[test]
fn scan_writes_one_directory_per_atom_number() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(cavcool()
        .args([
            "scan-n", "--preset", "fig2", "--n", "1,2", "--trajectories", "2",
            "--t-final", "5", "--seed", "1", "--formats", "csv", "--out",
        ])
        .arg(dir.path()));
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
    assert!(dir.path().join("n_1").join("series.csv").exists());
    assert!(dir.path().join("n_2").join("series.csv").exists());
    let scaling = std::fs::read_to_string(dir.path().join("scaling.csv")).unwrap();
    assert!(scaling.starts_with("n,tau_c,k_b_t"));
}
