// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mintime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mintime")).args(args).output().expect("spawn mintime")
}

fn quick_min_time(out: &Path, extra: &[&str]) -> Output {
    let out = out.to_str().unwrap();
    let mut args = vec!["min-time", "--t0", "20", "--max-iters", "40", "--max-outer-iters", "4", "--out", out];
    args.extend_from_slice(extra);
    mintime(&args)
}

#[test]
fn unknown_case_is_a_usage_error_listing_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = mintime(&["min-time", "--case", "BOGUS", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for name in ["QFT4", "SWAP02", "CNOT", "CCNOT", "SWAP_CHAIN"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn bad_flag_value_exits_two() {
    let o = mintime(&["sweep", "--durations", "10:20"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn min_time_writes_artifacts_and_reruns_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = quick_min_time(&first, &["--case", "SWAP02"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["config.toml", "summary.json", "history.csv", "pulse.json"] {
        assert!(first.join(f).is_file(), "missing {f}");
    }

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(first.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["mode"], "min-time");
    assert_eq!(summary["result"]["converged"], true);
    let pulse: serde_json::Value = serde_json::from_str(&fs::read_to_string(first.join("pulse.json")).unwrap()).unwrap();
    assert_eq!(pulse["qudits"].as_array().unwrap().len(), 1);

    let second = dir.path().join("second");
    let config = first.join("config.toml");
    let o = mintime(&["min-time", "--config", config.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(first.join("history.csv")).unwrap(), fs::read(second.join("history.csv")).unwrap());
    assert_eq!(fs::read(first.join("pulse.json")).unwrap(), fs::read(second.join("pulse.json")).unwrap());
}

#[test]
fn non_unitary_gate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(
        &config,
        r#"
name = "not-unitary"
knot_spacing = 0.3
t0 = 10.0
durations = "5:15:5"

[system]
levels = [2]
transition_ghz = [5.0]
kerr_ghz = [0.0]
rot_ghz = 5.0
couplings = []

[gate]
matrix = [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = mintime(&["optimize", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gate"));
}

#[test]
fn check_subcommand_passes() {
    let o = mintime(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn sweep_writes_one_pulse_per_duration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = mintime(&[
        "sweep", "--case", "SWAP02", "--durations", "10:14:4", "--restarts", "2", "--max-iters", "20", "--workers",
        "2", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pulses: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("pulse.json")).unwrap()).unwrap();
    assert_eq!(pulses.as_array().unwrap().len(), 2);
    let rows = fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 2);
}
