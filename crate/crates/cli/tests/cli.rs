//! End-to-end runs of the `cartan` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn cartan(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartan"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario-in.json");
    fs::write(&p, text).unwrap();
    p
}

/// Every data file of a run (the sidecar is excluded: it holds the clock).
fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "run.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn defect_free_verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cartan(&["verify", scenario("defect_free.json").to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    for c in report["checks"].as_array().unwrap() {
        if let Some(n) = c.get("coarseNorm") {
            assert_eq!(n.as_f64(), Some(0.0));
        }
    }
}

#[test]
fn tiny_grid_warns_about_underresolution() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cartan(&["verify", scenario("tiny.json").to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let report = fs::read_to_string(tmp.path().join("verify.json")).unwrap();
    assert!(report.contains("quadrature underresolution"));
}

#[test]
fn unknown_key_is_a_config_error_with_path() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("screw.json")).unwrap().replace("coreRadius", "coreRadious");
    let input = write_scenario(tmp.path(), &text);
    let out = cartan(&["charges", input.to_str().unwrap()], &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("defects[0]") && err.contains("coreRadious"), "{err}");
    assert!(!tmp.path().join("out").exists(), "nothing is written before validation");
}

#[test]
fn simulate_without_dynamics_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cartan(&["simulate", scenario("screw.json").to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unresolvable_charge_fails_verification() {
    // a core this wide does not fit inside the largest admissible disk
    let tmp = tempfile::tempdir().unwrap();
    let input = write_scenario(
        tmp.path(),
        r#"{"name": "fat-core",
            "grid": {"extents": [[-1.5, 1.5], [-1.5, 1.5], [0.0, 1.0]], "resolution": [32, 32, 8]},
            "defects": [{"kind": "screw", "axisPoint": [0.0, 0.0], "charge": 1.0, "coreRadius": 0.28}]}"#,
    );
    let out = cartan(&["verify", input.to_str().unwrap()], &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(tmp.path().join("out/verify.json").exists());
}

#[test]
fn annihilation_is_logged_and_ledger_balances() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cartan(&["simulate", scenario("annihilation.json").to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let events = fs::read_to_string(tmp.path().join("events.jsonl")).unwrap();
    assert_eq!(events.lines().count(), 1);
    let event: serde_json::Value = serde_json::from_str(events.lines().next().unwrap()).unwrap();
    assert_eq!(event["outgoing"].as_array().unwrap().len(), 0);
    let ledger: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("ledger.json")).unwrap()).unwrap();
    assert!(ledger["discrepancy"].as_f64().unwrap() < 1e-12);
    let lines: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("final_lines.json")).unwrap()).unwrap();
    assert!(lines.as_array().unwrap().is_empty());
}

#[test]
fn gamma_zero_moves_along_mobility_times_force() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cartan(&["simulate", scenario("gamma_zero.json").to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    for row in text.lines().skip(1) {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        // vx, vy, vz against M F_ext = (1, 0.5, 0)
        assert_eq!(&cols[6..9], &[1.0, 0.5, 0.0]);
    }
}

#[test]
fn identical_runs_are_bit_identical_and_echo_reproduces() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for (cmd, file) in [("simulate", "magnus.json"), ("fields", "wedge_screw.json"), ("charges", "edge.json")] {
        let s = scenario(file);
        assert_eq!(cartan(&[cmd, s.to_str().unwrap()], &a).status.code(), Some(0));
        assert_eq!(cartan(&[cmd, s.to_str().unwrap()], &b).status.code(), Some(0));
        assert_eq!(data_files(&a), data_files(&b), "{cmd} {file}");
        let echoed = a.join("scenario.json");
        assert_eq!(cartan(&[cmd, echoed.to_str().unwrap()], &c).status.code(), Some(0));
        assert_eq!(data_files(&a), data_files(&c), "{cmd} {file} from echo");
        for d in [&a, &b, &c] {
            fs::remove_dir_all(d).unwrap();
        }
    }
}

#[test]
fn resolution_scale_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cartan"))
        .args(["--out", tmp.path().to_str().unwrap(), "--resolution-scale", "2", "charges"])
        .arg(scenario("defect_free.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let echo: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("scenario.json")).unwrap()).unwrap();
    assert_eq!(echo["grid"]["resolution"], serde_json::json!([32, 32, 16]));
    let sidecar = fs::read_to_string(tmp.path().join("run.json")).unwrap();
    assert!(sidecar.contains("finishedUnixSeconds"));
}
