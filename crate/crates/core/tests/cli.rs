use std::path::Path;
use std::process::Command;

use indoor_mmwave::cli::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("indoor-mmwave").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn shipped(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_str().unwrap().to_string()
}

#[test]
fn eval_los_at_10m() {
    let (code, out, _) = run(&["eval-pathloss", "--model", "los", "--d", "10"]);
    assert_eq!(code, 0);
    assert_eq!(out, "-78.6\n");
}

#[test]
fn binary_prints_the_same() {
    let out = Command::new(env!("CARGO_BIN_EXE_indoor-mmwave"))
        .args(["eval-pathloss", "--model", "los", "--d", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "-78.6\n");
}

#[test]
fn eval_corner_and_formats() {
    let (_, out, _) = run(&["eval-pathloss", "--model", "corner", "--d", "20", "--d1", "17"]);
    assert_eq!(out, "-110.998\n");
    let (_, csv, _) = run(&["eval-pathloss", "--model", "nlos-room", "--d", "1", "10", "--format", "csv"]);
    assert_eq!(csv, "d_m,pg_db\n1,-87.6\n10,-108.6\n");
    let (_, json, _) = run(&["eval-pathloss", "--model", "los", "--d", "100", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["points"][0]["pg_db"], -96.2);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
}

#[test]
fn domain_error_is_json_on_stderr() {
    let (code, out, err) = run(&["eval-pathloss", "--model", "los", "--d", "0.5"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "domain");
}

#[test]
fn fit_shipped_corner_data() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run(&[
        "fit",
        "--input",
        &shipped("corner_data.csv"),
        "--model",
        "corner",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let n = v["parameters"]["n"].as_f64().unwrap();
    let pls = v["parameters"]["PL_S"].as_f64().unwrap();
    let rms = v["rms_error_db"].as_f64().unwrap();
    assert!((n + 1.81).abs() < 0.05, "{n}");
    assert!((pls + 18.7).abs() < 1.0, "{pls}");
    assert!((rms - 3.0).abs() < 0.4, "{rms}");
    assert!(dir.path().join("residuals.csv").exists());
    assert!(dir.path().join("fit_report.json").exists());
}

#[test]
fn fit_missing_file() {
    let (code, _, err) = run(&["fit", "--input", "/nonexistent/data.csv"]);
    assert_eq!(code, 1);
    assert!(err.contains("\"io\""), "{err}");
}

#[test]
fn simulate_outputs_feed_fit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, err) = run(&["simulate", "--scene", "h_building", "--terminals", "500", "--seed", "3", "--out", d]);
    assert_eq!(code, 0, "{err}");
    let summary: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(summary["terminals"], 500);
    for f in ["links.csv", "sinr_cdf.csv", "rate_cdf.csv", "summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let links = dir.path().join("links.csv");
    let (code, out, err) = run(&["fit", "--input", links.to_str().unwrap(), "--model", "slope-intercept"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n_points"], 500);
}

#[test]
fn simulate_twice_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let (code, _, err) = run(&[
            "simulate",
            "--scene",
            "h_building",
            "--terminals",
            "10000",
            "--seed",
            "7",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    for f in ["links.csv", "sinr_cdf.csv", "rate_cdf.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seeds_change_simulation() {
    let (_, a, _) = run(&["simulate", "--scene", "h_building", "--terminals", "200", "--seed", "1"]);
    let (_, b, _) = run(&["simulate", "--scene", "h_building", "--terminals", "200", "--seed", "2"]);
    assert_ne!(a, b);
}

#[test]
fn bad_scene_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.toml");
    std::fs::write(&p, "version = 1\n[geometry\n").unwrap();
    let (code, _, err) = run(&["simulate", "--scene", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "syntax");
    assert!(v["message"].as_str().unwrap().contains("line 2"));
}

#[test]
fn azimuth_gain_of_spectrum_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("spectrum.csv");
    std::fs::write(&p, indoor_mmwave::angular::AngularSpectrum::delta(10).to_csv()).unwrap();
    let (code, out, _) = run(&["azimuth-gain", "--input", p.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "azimuth_gain_db\n25.563\n");
    let (code, out, _) = run(&["azimuth-gain", "--draws", "2000", "--seed", "4"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["azimuth_gain_db"]["p50"].as_f64().unwrap() > 0.0);
}

#[test]
fn fade_stats_synthetic_and_file() {
    let (code, out, err) = run(&["fade-stats", "--k-db", "6.5", "--samples", "200000", "--correlation-ms", "20", "--seed", "5"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["k_factor_db"].as_f64().unwrap() - 6.5).abs() < 0.5);
    assert!(v["coherence_time_ms"].as_f64().is_some());

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("trace.csv");
    std::fs::write(&p, "rate_hz=740\n0.1\n1.9\n0.1\n1.9\n").unwrap();
    let (code, out, _) = run(&["fade-stats", "--input", p.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "0.5,-10"), "{out}");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("nested").join("pg.txt");
    let (code, out, _) = run(&["eval-pathloss", "--model", "los", "--d", "10", "--seed", "1", "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(p).unwrap(), "-78.6\n");
}

#[test]
fn corner_legs_without_total() {
    let (code, a, _) = run(&["eval-pathloss", "--model", "corner", "--d1", "10", "--d2", "20"]);
    let (_, b, _) = run(&["eval-pathloss", "--model", "corner", "--d", "30", "--d1", "10"]);
    assert_eq!(code, 0);
    assert_eq!(a, b);
}
