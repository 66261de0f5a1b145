//! End-to-end CLI checks: subcommand flow, outputs, exit codes.

use std::path::Path;
use std::process::Command;

fn vigil() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vigil"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn vigil");
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn defaults_lists_every_section() {
    let text = run_ok(vigil().arg("defaults"));
    for key in [
        "filter.hampel_window = 11",
        "gating.fov_half = 45",
        "regions.pv_weight = 0.5",
        "tracker.vehicle.p_survival = 0.99",
        "tracker.pedestrian.process_noise_accel = 0.5",
        "headpose.mount_offset = auto",
    ] {
        assert!(text.contains(key), "defaults missing '{key}'");
    }
}

#[test]
fn synth_then_full_pipeline_flow() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario");
    run_ok(vigil()
        .args(["synth", "--profile", "drift", "--seed", "5", "--laps", "2"])
        .args(["--drivers", "A,B"])
        .arg("--out-dir")
        .arg(&scenario));
    let config = scenario.join("pipeline.conf");
    assert!(config.exists());

    // ingest validates cleanly (exit 0).
    run_ok(vigil().arg("ingest").arg("--config").arg(&config));

    // report completes; synthetic scenarios usually carry ledger warnings
    // (gap fills etc.), so accept 0 or 2 but never 1.
    let out = vigil()
        .arg("report")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    let code = out.status.code().unwrap();
    assert!(code == 0 || code == 2, "report exit {code}");
    let report_path = scenario.join("out/report.json");
    assert!(report_path.exists());
    let report = std::fs::read_to_string(&report_path).unwrap();
    assert!(report.contains("\"cases\""));

    // Stage-wise: analyze reuses the persisted intermediates.
    let analyze = vigil()
        .arg("analyze")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&analyze.stdout);
    assert!(stdout.contains("reusing"), "analyze did not reuse: {stdout}");
    assert!(scenario.join("out/metrics.jsonl").exists());

    // classify the persisted metrics.
    let labels = scenario.join("out/labels.jsonl");
    let classify = vigil()
        .arg("classify")
        .arg("--metrics")
        .arg(scenario.join("out/metrics.jsonl"))
        .arg("--out")
        .arg(&labels)
        .output()
        .unwrap();
    assert_ne!(classify.status.code(), Some(1));
    assert!(labels.exists());
}

#[test]
fn missing_config_is_fatal_exit_one() {
    let out = vigil()
        .args(["report", "--config", "/definitely/not/here.conf"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn config_override_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario");
    run_ok(vigil()
        .args(["synth", "--profile", "attentive", "--seed", "6", "--laps", "1"])
        .arg("--out-dir")
        .arg(&scenario));
    // An invalid override must fail fast.
    let out = vigil()
        .arg("report")
        .arg("--config")
        .arg(scenario.join("pipeline.conf"))
        .args(["--set", "filter.hampel_window=4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "even window must be rejected");
    assert!(String::from_utf8_lossy(&out.stderr).contains("hampel_window"));
}

#[test]
fn unknown_profile_rejected() {
    let out = vigil()
        .args(["synth", "--profile", "bogus", "--out-dir", "/tmp/never"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scenario_dir_contains_all_inputs() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(vigil()
        .args(["synth", "--profile", "alternating", "--seed", "7", "--laps", "2"])
        .arg("--out-dir")
        .arg(dir.path()));
    for file in [
        "ego.csv",
        "landmarks.jsonl",
        "detections.jsonl",
        "intrinsics.json",
        "zones.json",
        "annotations.csv",
        "truth.json",
        "pipeline.conf",
    ] {
        assert!(Path::new(dir.path()).join(file).exists(), "missing {file}");
    }
}
