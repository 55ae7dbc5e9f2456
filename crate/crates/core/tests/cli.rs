use std::fs;
use std::process::Command;

use nlq_core::cli::export::{parse_csv, parse_json};
use nlq_core::cli::{EXIT_OK, EXIT_USAGE};

fn nlq(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nlq"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn list_names_every_scenario() {
    let out = nlq(&["list"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["sec3", "sec5", "sec6", "sec7", "sec8"] {
        assert!(text.contains(name), "{name} missing from:\n{text}");
    }
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    for args in [
        &["run", "sec9"][..],
        &["run", "sec5", "--p", "1.5"],
        &["run", "sec5", "--dt", "0"],
        &["run", "sec5", "--dt", "20"],
        &["run", "sec8", "--basis", "sideways"],
        &["run", "sec5", "--precision", "3"],
        &["frobnicate"],
    ] {
        let out = nlq(args);
        assert_eq!(out.status.code(), Some(EXIT_USAGE), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn degenerate_mixing_is_rejected() {
    assert_eq!(nlq(&["run", "sec6", "--p", "1"]).status.code(), Some(EXIT_USAGE));
}

#[test]
fn changed_correlations_csv_has_flat_arm_a() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sec7.csv");
    let out = nlq(&["run", "sec7", "--t-max", "5", "--dt", "0.01", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let arms = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<&str> = arms.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["armA", "armB"]);
    assert_eq!(arms[0].trajectory.len(), 501);
    assert!(arms[0].trajectory.s2().all(|s| s.abs() < 1e-10));
    assert!(arms[1].trajectory.s2().any(|s| s.abs() > 0.5));
}

#[test]
fn json_output_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sec8.json");
    let out = nlq(&["run", "sec8", "--basis", "diag", "--dt", "0.01", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let doc = parse_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc.scenario, "sec8");
    assert_eq!(doc.config.basis, "diag");
    assert!(doc.contracts.iter().all(|c| c.holds));
    assert!((doc.divergence - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
}

#[test]
fn format_flag_overrides_extension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = nlq(&["run", "sec5", "--dt", "0.1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(fs::read_to_string(&path).unwrap().starts_with("t,arm,"));
}

#[test]
fn verify_linear_reports_pass() {
    let out = nlq(&["verify-linear", "--trials", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("verify-linear trials=100 seed=7 "), "{text}");
    assert!(text.trim_end().ends_with("PASS"), "{text}");
}

#[test]
fn stdout_output_when_no_path() {
    let out = nlq(&["run", "sec5", "--t-max", "1", "--dt", "0.5"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2);
}
