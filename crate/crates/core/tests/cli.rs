use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const DESK: &str = r#"
min_lon = -73.9880
max_lon = -73.9809
min_lat = 40.7500
max_lat = 40.7554
window_start = "08:15"
window_end = "08:20"
xi = 350
t_window = 240
mode = "greedy"
"#;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn ridepool(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridepool"))
        .current_dir(dir)
        .env_clear()
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("desk.toml"), DESK).unwrap();
    let out = ridepool(
        dir.path(),
        &["--config", "desk.toml", "gen", "--requests", "8", "--vehicles", "4", "--seed", "5", "--out", "inst.json"],
    );
    stdout(&out);
    dir
}

#[test]
fn run_is_byte_stable_and_clean() {
    let dir = setup();
    let args = ["--config", "desk.toml", "run", "--instance", "inst.json"];
    let a = stdout(&ridepool(dir.path(), &args));
    let b = stdout(&ridepool(dir.path(), &args));
    assert_eq!(a, b);
    let report: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(report["oracle"]["bnb_gap"], 0);
    assert_eq!(report["bnb"]["violations"], Value::Array(vec![]));
    assert!(report["bnb"].get("elapsed").is_none());

    let timed = stdout(&ridepool(dir.path(), &["--timings", "--config", "desk.toml", "run", "--instance", "inst.json"]));
    assert!(timed.contains("\"elapsed\""));
}

#[test]
fn solver_output_validates_and_tampering_is_caught() {
    let dir = setup();
    for solver in ["solve-flow", "solve-bnb"] {
        let out = ridepool(
            dir.path(),
            &["--config", "desk.toml", solver, "--instance", "inst.json", "--assignment-out", "a.json", "--out", "r.json"],
        );
        stdout(&out);
        for file in ["a.json", "r.json"] {
            let ok = ridepool(dir.path(), &["--config", "desk.toml", "validate", "--instance", "inst.json", "--assignment", file]);
            assert_eq!(stdout(&ok).trim(), "[]");
        }
    }

    let mut a: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    a["served"] = Value::from(99);
    std::fs::write(dir.path().join("bad.json"), a.to_string()).unwrap();
    let bad = ridepool(dir.path(), &["--config", "desk.toml", "validate", "--instance", "inst.json", "--assignment", "bad.json"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("served_mismatch"));
}

#[test]
fn oracle_and_group_subcommands() {
    let dir = setup();
    let oracle: Value = serde_json::from_str(&stdout(&ridepool(
        dir.path(),
        &["--config", "desk.toml", "oracle", "--instance", "inst.json"],
    )))
    .unwrap();
    assert!(oracle["best_served"].as_u64().unwrap() <= 8);
    assert_eq!(oracle["elapsed"], 0.0);
    let groups: Value =
        serde_json::from_str(&stdout(&ridepool(dir.path(), &["--config", "desk.toml", "group", "--instance", "inst.json"]))).unwrap();
    assert!(groups["groups"].is_array());
}

#[test]
fn ingest_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let trips = fixture("trips_100.csv");
    let out = ridepool(dir.path(), &["ingest", "--input", trips.to_str().unwrap()]);
    let inst: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(inst["requests"].as_array().unwrap().len(), 37);
    assert!(String::from_utf8_lossy(&out.stderr).contains("kept 37, skipped 5, filtered 58"));
}

#[test]
fn overrides_follow_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let trips = fixture("trips_100.csv");
    let trips = trips.to_str().unwrap();
    std::fs::write(dir.path().join("late.toml"), "window_start = \"09:00\"\nwindow_end = \"10:00\"\n").unwrap();
    let count = |out: Output| -> usize {
        let inst: Value = serde_json::from_str(&stdout(&out)).unwrap();
        inst["requests"].as_array().unwrap().len()
    };
    let from_file = count(ridepool(dir.path(), &["--config", "late.toml", "ingest", "--input", trips]));
    assert_ne!(from_file, 37);

    let mut env = Command::new(env!("CARGO_BIN_EXE_ridepool"));
    env.current_dir(dir.path())
        .env_clear()
        .env("RIDEPOOL_WINDOW_START", "08:15")
        .env("RIDEPOOL_WINDOW_END", "08:30")
        .args(["--config", "late.toml", "ingest", "--input", trips]);
    assert_eq!(count(env.output().unwrap()), 37);

    let flag = ridepool(
        dir.path(),
        &["--config", "late.toml", "--set", "window_start=08:15", "--set", "window_end=08:30", "ingest", "--input", trips],
    );
    assert_eq!(count(flag), 37);
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridepool(dir.path(), &["--set", "no_such_key=1", "gen", "--requests", "2", "--vehicles", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ridepool(dir.path(), &["run"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quick_bench_reports_fit_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out: Value = serde_json::from_str(&stdout(&ridepool(dir.path(), &["bench", "--quick"]))).unwrap();
    assert_eq!(out["scaling"]["points"].as_array().unwrap().len(), 4);
    assert!(out["scaling"]["slope"].as_f64().unwrap().is_finite());
    let branching = out["branching"].as_array().unwrap();
    assert_eq!(branching.len(), 10);
    assert!(branching.iter().all(|b| b["within_trivial_bound"] == true));
}
