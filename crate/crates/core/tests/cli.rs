use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn pipediff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pipediff"))
        .args(args)
        .env_remove("PIPEDIFF_SEED")
        .output()
        .unwrap()
}

fn reference() -> String {
    fixture("reference.scn").display().to_string()
}

#[test]
fn validate_good_file() {
    let out = pipediff(&["validate", &reference()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_bad_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    let text = std::fs::read_to_string(fixture("reference.scn"))
        .unwrap()
        .replace("sweep = 180 deg", "sweep = 270 deg");
    std::fs::write(&bad, text).unwrap();
    let out = pipediff(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("invariant violation"), "{stderr}");
    assert!(stderr.contains("line "), "{stderr}");
}

#[test]
fn missing_file_is_a_runtime_error() {
    let out = pipediff(&["validate", "/nonexistent/file.scn"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_trace_and_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("out.csv");
    let report = dir.path().join("report.json");
    let out = pipediff(&[
        "run",
        &reference(),
        "--trace",
        trace.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("t,s,segment,theta,vA,vB,vC,"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["completed"], true);
    assert_eq!(json["segments"].as_array().unwrap().len(), 4);
    assert_eq!(json["tracks"].as_array().unwrap().len(), 3);
    assert_eq!(json["limits"]["max_compression"], 16.0);
}

#[test]
fn seed_flag_and_env_agree() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("reference.scn"))
        .unwrap()
        .replace("disturbance_amplitude = 0", "disturbance_amplitude = 0.025");
    let scn = dir.path().join("noisy.scn");
    std::fs::write(&scn, text).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = pipediff(&["run", scn.to_str().unwrap(), "--trace", a.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_pipediff"))
        .args(["run", scn.to_str().unwrap(), "--trace", b.to_str().unwrap()])
        .env("PIPEDIFF_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn theta_override_and_no_fit_exit_code() {
    let out = pipediff(&["run", &reference(), "--theta", "-120"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("roll -120.000 deg"), "{stdout}");

    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("reference.scn"))
        .unwrap()
        .replace("length = 82 mm", "length = 230 mm");
    let scn = dir.path().join("long.scn");
    std::fs::write(&scn, text).unwrap();
    let trace = dir.path().join("partial.csv");
    let out = pipediff(&["run", scn.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no fit"));
    assert!(std::fs::read_to_string(&trace).unwrap().lines().count() > 1);
}

#[test]
fn sweep_writes_one_trace_per_orientation() {
    let dir = tempfile::tempdir().unwrap();
    let traces = dir.path().join("traces");
    let report = dir.path().join("sweep.json");
    let out = pipediff(&[
        "sweep",
        &reference(),
        "--theta-steps",
        "3",
        "--trace-dir",
        traces.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_dir(&traces).unwrap().count(), 3);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let runs = json["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    let means: Vec<f64> = runs.iter().map(|r| r["mean_speed"].as_f64().unwrap()).collect();
    for m in &means {
        assert!((m - means[0]).abs() < 1e-9);
    }
    let rolls: Vec<f64> = runs.iter().map(|r| r["roll_deg"].as_f64().unwrap()).collect();
    assert!((rolls[1] - 120.0).abs() < 1e-9);
}

#[test]
fn usage_errors() {
    assert_eq!(pipediff(&[]).status.code(), Some(2));
    assert_eq!(pipediff(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pipediff(&["--help"]).status.code(), Some(0));
    assert_eq!(
        pipediff(&["sweep", &reference(), "--theta-steps", "0"]).status.code(),
        Some(1)
    );
}
