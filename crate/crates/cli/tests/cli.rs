use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn toplag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toplag"))
        .args(args)
        .output()
        .expect("spawn toplag")
}

fn ok(args: &[&str]) {
    let out = toplag(args);
    assert!(
        out.status.success(),
        "toplag {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a `label,value` CSV with integer labels.
fn write_series(path: &Path, values: &[f64]) {
    let mut text = String::from("label,value\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{i},{v}\n"));
    }
    fs::write(path, text).unwrap();
}

fn synth(dir: &Path, extra: &[&str]) -> (PathBuf, PathBuf) {
    let mut args = vec!["synth", "--out", s(dir)];
    args.extend_from_slice(extra);
    ok(&args);
    (dir.join("x.csv"), dir.join("y.csv"))
}

#[test]
fn missing_input_exits_2_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let (x, _) = synth(&dir.path().join("s"), &[]);
    let missing = dir.path().join("nope.csv");
    let out = toplag(&["analyze", s(&x), s(&missing), "--out", s(&dir.path().join("a"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));
}

#[test]
fn invalid_window_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = synth(&dir.path().join("s"), &[]);
    let out = toplag(&[
        "analyze",
        s(&x),
        s(&y),
        "--transform",
        "none",
        "--windows",
        "5000",
        "--out",
        s(&dir.path().join("a")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window length 5000"));
}

#[test]
fn log_returns_reject_non_positive_levels() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    write_series(&x, &[1.0, 2.0, -1.0, 3.0]);
    let out = toplag(&["analyze", s(&x), s(&x), "--out", s(&dir.path().join("a"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x.csv"));
}

#[test]
fn synth_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (x1, y1) = synth(&dir.path().join("a"), &["--seed", "4"]);
    let (x2, y2) = synth(&dir.path().join("b"), &["--seed", "4"]);
    let (x3, _) = synth(&dir.path().join("c"), &["--seed", "5"]);
    assert_eq!(fs::read(&x1).unwrap(), fs::read(&x2).unwrap());
    assert_eq!(fs::read(&y1).unwrap(), fs::read(&y2).unwrap());
    assert_ne!(fs::read(&x1).unwrap(), fs::read(&x3).unwrap());
}

#[test]
fn synth_models_have_the_documented_structure() {
    let dir = tempfile::tempdir().unwrap();
    for (name, len, lags) in [
        ("A", 500, [30, 15, 0, -15, -30]),
        ("B", 1000, [30, 15, 0, -15, -30]),
        ("C", 1000, [60, 30, 0, -30, -60]),
    ] {
        let out = dir.path().join(name);
        synth(&out, &["--paper-model", name]);
        let model = json(&out.join("model.json"));
        let got: Vec<i64> = model["model"]["segments"]
            .as_array()
            .unwrap()
            .iter()
            .map(|seg| seg["lag"].as_i64().unwrap())
            .collect();
        assert_eq!(got, lags, "model {name}");
        assert_eq!(model["lags"].as_array().unwrap().len(), len);
        let rows = fs::read_to_string(out.join("y.csv")).unwrap().lines().count();
        assert_eq!(rows, len + 1, "model {name}");
    }
}

#[test]
fn synth_random_model_respects_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    synth(
        &out,
        &["--random", "--segments", "3", "--segment-len", "50", "--max-lag", "4", "--a", "0.9", "--f", "0.3"],
    );
    let model = json(&out.join("model.json"));
    assert_eq!(model["kind"], "random");
    assert_eq!(model["model"]["a"], 0.9);
    assert_eq!(model["model"]["f"], 0.3);
    let segs = model["model"]["segments"].as_array().unwrap();
    assert_eq!(segs.len(), 3);
    assert!(segs.iter().all(|seg| seg["lag"].as_i64().unwrap().abs() <= 4));
}

#[test]
fn identical_series_give_a_zero_path_and_unit_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let (x, _) = synth(&dir.path().join("s"), &["--seed", "1"]);
    let out = dir.path().join("a");
    ok(&["analyze", s(&x), s(&x), "--transform", "none", "--windows", "100", "--step", "25", "--out", s(&out)]);

    let path = json(&out.join("path.json"));
    assert!(path["xs"].as_array().unwrap().iter().all(|v| v.as_f64().unwrap().abs() < 0.5));
    assert!(path["lags"].as_array().unwrap().iter().all(|v| v.as_i64() == Some(0)));

    let windows = json(&out.join("windows.json"));
    let scan = &windows[0];
    let synced = scan["synchronized"].as_array().unwrap();
    assert_eq!(synced.len(), 17);
    assert_eq!(scan["synchronized_significant"], 17);
    assert!(synced.iter().all(|r| (r["a_hat"].as_f64().unwrap() - 1.0).abs() < 1e-9));
}

#[test]
fn csv_format_writes_tables_and_manifest_echoes_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = synth(&dir.path().join("s"), &[]);
    let out = dir.path().join("a");
    ok(&["analyze", s(&x), s(&y), "--transform", "standardize", "--format", "csv", "--out", s(&out)]);
    for f in ["path.csv", "lags.csv", "energies.csv", "windows.csv", "manifest.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let lags = fs::read_to_string(out.join("lags.csv")).unwrap();
    assert_eq!(lags.lines().next(), Some("index,lag,usable"));
    assert_eq!(lags.lines().count(), 501);

    let m = json(&out.join("manifest.json"));
    assert_eq!(m["command"], "analyze");
    assert_eq!(m["config"]["global"]["temperature"], 2.0);
    assert_eq!(m["config"]["global"]["method"], "tops");
    assert_eq!(m["config"]["global"]["max_offset"], 30);
    assert_eq!(m["config"]["analyze"]["windows"], serde_json::json!([12, 24, 36, 48]));
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["span"]["rows"], 500);
    assert_eq!(m["transforms"], serde_json::json!(["align", "standardize"]));
    let outputs: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["file"].as_str().unwrap())
        .collect();
    assert_eq!(outputs, ["path.csv", "lags.csv", "energies.csv", "windows.csv"]);
}

#[test]
fn map_smoke_writes_one_profile_row_per_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    ok(&[
        "map",
        "--a-values",
        "0.5,1",
        "--f-values",
        "0.2",
        "--ensemble",
        "4",
        "--temperatures",
        "1,2",
        "--segments",
        "2",
        "--segment-len",
        "40",
        "--max-lag",
        "3",
        "--max-offset",
        "5",
        "--out",
        s(&out),
    ]);
    let profile = json(&out.join("profile.json"));
    let temps: Vec<f64> = profile
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["temperature"].as_f64().unwrap())
        .collect();
    assert_eq!(temps, [1.0, 2.0]);
    let map = json(&out.join("map-2.json"));
    let rho = map["rho"].as_array().unwrap();
    assert_eq!(rho.len(), 2);
    assert!(rho.iter().all(|r| (0.0..=1.0).contains(&r.as_f64().unwrap())));
}

#[test]
fn analyze_annotates_windows_from_a_map() {
    let dir = tempfile::tempdir().unwrap();
    let maps = dir.path().join("m");
    ok(&[
        "map",
        "--a-values",
        "0.5,1",
        "--f-values",
        "0.2,1",
        "--ensemble",
        "3",
        "--segments",
        "2",
        "--segment-len",
        "40",
        "--max-lag",
        "3",
        "--max-offset",
        "5",
        "--out",
        s(&maps),
    ]);
    let (x, y) = synth(&dir.path().join("s"), &[]);
    let out = dir.path().join("a");
    let map = maps.join("map-2.json");
    ok(&[
        "analyze", s(&x), s(&y), "--transform", "none", "--windows", "100", "--step", "100", "--map", s(&map),
        "--out", s(&out),
    ]);
    let windows = json(&out.join("windows.json"));
    assert!(windows[0]["synchronized"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["rho_lookup"].is_number()));
    assert_eq!(json(&out.join("manifest.json"))["inputs"].as_array().unwrap().len(), 3);
}

#[test]
fn band_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    let y = dir.path().join("y.csv");
    let vals = |k: f64| -> Vec<f64> { (0..40).map(|i| 10.0 + ((i as f64) * k).sin()).collect() };
    write_series(&x, &vals(0.7));
    write_series(&y, &vals(1.3));
    let out = dir.path().join("b");
    ok(&[
        "band", s(&x), s(&y), "--n", "20", "--max-offset", "5", "--keep-paths", "--format", "csv", "--out", s(&out),
    ]);
    let band = fs::read_to_string(out.join("band.csv")).unwrap();
    // 39 returns give 2 * 39 - 1 levels.
    assert_eq!(band.lines().count(), 1 + 77);
    let paths = fs::read_to_string(out.join("band_paths.csv")).unwrap();
    assert_eq!(paths.lines().count(), 1 + 20 * 77);

    let out = toplag(&["band", s(&x), s(&y), "--n", "5", "--out", s(&dir.path().join("c"))]);
    assert_eq!(out.status.code(), Some(2));
}
