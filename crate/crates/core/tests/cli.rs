use std::path::Path;
use std::process::{Command, Output};

use qdisp::cli::RunRecord;

fn qdisp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdisp"))
        .args(args)
        .output()
        .expect("spawn qdisp")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn record(out: &Output) -> RunRecord {
    RunRecord::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("valid record")
}

#[test]
fn fock_single_row() {
    let out = qdisp(&["repro", "fock", "--n-max", "0"]);
    assert_eq!(code(&out), 0);
    let rec = record(&out);
    assert_eq!(rec.rows.len(), 1);
    assert!((rec.rows[0]["q11"].as_f64().unwrap() - 2.0).abs() < 1e-7);
    assert!((rec.rows[0]["r"].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert_eq!(rec.meta.tool_version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn fock_var_product_column() {
    let rec = record(&qdisp(&["repro", "fock", "--n-max", "10"]));
    assert_eq!(rec.rows.len(), 11);
    let bound = rec.rows[10]["var_product_bound"].as_f64().unwrap();
    assert!((bound - 1.0 / 42.0f64.powi(2)).abs() < 1e-15);
}

#[test]
fn record_round_trips_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vac.json");
    let out = qdisp(&["repro", "vacuum-one", "--points", "21", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let rec = RunRecord::from_json(&text).unwrap();
    assert_eq!(rec.rows.len(), 21);
    assert_eq!(rec.to_json().unwrap(), text);
    let quarter = &rec.rows[5];
    assert_eq!(quarter["lambda"], 0.25);
    assert!((quarter["q_closed"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn csv_output_has_meta_and_header() {
    let out = qdisp(&["--format", "csv", "repro", "photon-added-thermal", "--lambda", "0.5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# meta: {"));
    assert!(lines.next().unwrap().starts_with("experiment,"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn photon_added_half() {
    let rec = record(&qdisp(&["repro", "photon-added-thermal", "--lambda", "0,0.5"]));
    let (zero, half) = (&rec.rows[0], &rec.rows[1]);
    assert!((zero["q_closed"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!((half["q_closed"].as_f64().unwrap() - 1.070).abs() < 5e-3);
    let w = half["wigner_origin"].as_f64().unwrap();
    assert!((w + 1.0 / (9.0 * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn purify_exit_codes() {
    let out = qdisp(&["purify", "--sigma", "2,0,0,2", "--n-fock", "4"]);
    assert_eq!(code(&out), 0);
    let rec = record(&out);
    assert_eq!(rec.rows[0]["plan"]["lambda"], 0.375);
    assert!(rec.rows[0]["cm_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(code(&qdisp(&["purify", "--sigma", "0.1,0,0,0.1"])), 3);
    assert_eq!(code(&qdisp(&["purify", "--sigma", "1,0,0"])), 2);
}

#[test]
fn truncation_exit_code() {
    let out = qdisp(&["--dim", "64", "repro", "squeezed-mixture", "--r", "2"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("try dim"));
}

#[test]
fn invalid_flags_and_grids() {
    assert_eq!(code(&qdisp(&["repro", "fock", "--bogus"])), 2);
    assert_eq!(code(&qdisp(&["repro", "vacuum-one", "--lambda", "1.5"])), 2);
    assert_eq!(code(&qdisp(&["--dim", "8", "repro", "fock", "--n-max", "6"])), 2);
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn analyze_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let fock3 = write(dir.path(), "f.json", r#"{"kind":"fock","params":{"n":3},"dim":32}"#);
    let rec = record(&qdisp(&["analyze", &fock3]));
    let rep = &rec.rows[0]["report"];
    assert!((rep["qfi"][0][0].as_f64().unwrap() - 14.0).abs() < 1e-9);
    assert!((rep["r"].as_f64().unwrap() - 1.0 / 7.0).abs() < 1e-9);

    let sq = write(dir.path(), "s.json", r#"{"kind":"squeezed","params":{"r":0.5}}"#);
    let rep = record(&qdisp(&["analyze", &sq])).rows[0]["report"].clone();
    assert!((rep["det_q"].as_f64().unwrap() - 4.0).abs() < 1e-8);

    let bad = write(dir.path(), "b.json", r#"{"kind":"fock","params":{"m":3}}"#);
    assert_eq!(code(&qdisp(&["analyze", &bad])), 2);
    assert_eq!(code(&qdisp(&["analyze", "/nonexistent/spec.json"])), 2);
}

#[test]
fn analyze_matches_repro_row() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "m.json",
        r#"{"kind":"squeezed_mixture","params":{"r":1.0}}"#,
    );
    let a = record(&qdisp(&["analyze", &spec]));
    let b = record(&qdisp(&["repro", "squeezed-mixture", "--r", "1"]));
    assert_eq!(a.rows[0]["report"], b.rows[0]["report"]);
}

#[test]
fn validate_quick_and_negative_control() {
    let ok = qdisp(&["validate", "--level", "quick"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = qdisp(&["validate", "--inject-fault"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("FAIL  fock_ladder"));
}
