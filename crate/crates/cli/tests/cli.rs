use std::path::Path;
use std::process::{Command, Output};

use dipolatt_cli::commands::{ENSEMBLE_COLUMNS, FIDELITY_COLUMNS, FOM_COLUMNS, GATE_COLUMNS, SWEEP_COLUMNS};
use serde_json::Value;

fn dipolatt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dipolatt")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = dipolatt(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = dipolatt(args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

/// Header and records of a CSV output, skipping the `#` lines.
fn csv_table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

fn ok_csv(args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    let out = dipolatt(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    csv_table(&String::from_utf8(out.stdout).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn separated_wells_figure_of_merit() {
    let doc = ok_json(&["fom", "--geometry", "separated", "--eta", "0.05", "--zbar", "2.5"]);
    let v = doc["rows"][0]["value"].as_f64().unwrap();
    assert!((v / -123.0 - 1.0).abs() < 0.05, "{v}");
    assert_eq!(doc["config"]["command"], "fom");
    assert_eq!(doc["version"], format!("dipolatt {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn sweep_peaks_at_two_and_a_half() {
    let (header, rows) = ok_csv(&["sweep", "--geometry", "separated", "--zbar", "0.1:10:200", "--eta", "1", "--format", "csv"]);
    assert_eq!(header[0], "zbar");
    assert_eq!(rows.len(), 200);
    let best = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap().abs()))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    // grid spacing is 0.05
    assert!((best.0 - 2.5).abs() < 0.05, "{best:?}");
    let grid: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(grid.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn empty_and_malformed_ranges_are_validation_errors() {
    for bad in ["0.1:10:0", "1:2", "x:1:3"] {
        let (c, err) = code(&["sweep", "--zbar", bad]);
        assert_eq!(c, 2, "{bad}: {err}");
        assert!(err.contains("zbar"), "{err}");
    }
    assert_eq!(code(&["sweep", "--eta", "1"]).0, 2);
    assert_eq!(code(&["sweep", "--zbar", "1:2:3", "--eta", "0.1:0.2:3"]).0, 2);
}

#[test]
fn csv_headers_are_stable() {
    let (h, _) = ok_csv(&["fom", "--format", "csv"]);
    assert_eq!(h, FOM_COLUMNS);
    assert_eq!(FOM_COLUMNS, ["geometry", "value", "scaled", "method", "includes_retardation", "in_regime"]);
    let (h, _) = ok_csv(&["gate", "--format", "csv"]);
    assert_eq!(h, GATE_COLUMNS);
    assert_eq!(
        GATE_COLUMNS,
        ["kind", "fidelity", "superposition_fidelity", "leakage", "phase", "duration", "scattering_error"]
    );
    let (h, _) = ok_csv(&["fidelity", "--format", "csv"]);
    assert_eq!(h, FIDELITY_COLUMNS);
    let (h, rows) = ok_csv(&["ensemble", "--n-sites", "2000", "--format", "csv"]);
    assert_eq!(h, ENSEMBLE_COLUMNS);
    assert_eq!(rows.len(), 2);
    let (h, _) = ok_csv(&["sweep", "--eta", "0.05:0.1:3", "--format", "csv"]);
    assert_eq!(h[0], "eta");
    assert_eq!(&h[1..], SWEEP_COLUMNS);
}

#[test]
fn csv_uses_nine_significant_digits() {
    let (_, rows) = ok_csv(&["fom", "--format", "csv"]);
    let value = &rows[0][1];
    let mantissa = value.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 9, "{value}");
}

#[test]
fn precedence_cli_over_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"eta": 0.1, "zbar": 3.0}"#);
    let doc = ok_json(&["fom", "--config", &cfg, "--eta", "0.05"]);
    assert_eq!(doc["config"]["eta"], 0.05);
    assert_eq!(doc["config"]["zbar"], 3.0);
    assert_eq!(doc["config"]["eta_par"], 0.1);
    assert_eq!(doc["config"]["geometry"], "separated");
}

#[test]
fn json_output_round_trips_as_config() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["fom", "--geometry", "ellipsoid", "--eta-perp", "0.07", "--eta-par", "0.13"],
        vec!["sweep", "--zbar", "0.3:4.1:17", "--eta", "0.031"],
        vec!["ensemble", "--n-sites", "5000", "--seed", "9", "--gate-fidelity", "0.8"],
        vec!["fidelity", "--intensity-ratio", "3e5"],
        vec!["gate", "--kind", "ramsey"],
    ] {
        let first = dipolatt(&args);
        assert!(first.status.success());
        let path = write(dir.path(), "prev.json", &String::from_utf8(first.stdout.clone()).unwrap());
        let second = dipolatt(&[args[0], "--config", &path]);
        assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn config_for_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dipolatt(&["fom"]);
    let path = write(dir.path(), "fom.json", &String::from_utf8(out.stdout).unwrap());
    let (c, err) = code(&["gate", "--config", &path]);
    assert_eq!(c, 2);
    assert!(err.contains("command"), "{err}");
}

#[test]
fn unknown_and_mistyped_fields_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.json", r#"{"eta": 0.05, "etaa": 1}"#);
    let (c, err) = code(&["fom", "--config", &p]);
    assert_eq!(c, 2);
    assert!(err.contains("etaa"), "{err}");
    let p = write(dir.path(), "b.json", r#"{"q": "one"}"#);
    let (c, err) = code(&["fom", "--config", &p]);
    assert_eq!(c, 2);
    assert!(err.contains("invalid type"), "{err}");
    let p = write(dir.path(), "c.json", "{\n  \"eta\": 0.05,\n  \"zbar\": ,\n}");
    let (c, err) = code(&["fom", "--config", &p]);
    assert_eq!(c, 2);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["fom", "--eta", "-1"]).0, 2);
    assert_eq!(code(&["fom", "--q", "2"]).0, 2);
    assert_eq!(code(&["nonsense"]).0, 2);
    assert_eq!(code(&["fom", "--workers", "0"]).0, 2);
    assert_eq!(code(&["gate", "--geometry", "sphere"]).0, 2);
    // no targets: the estimator has nothing to divide by
    assert_eq!(code(&["ensemble", "--fill-probability", "0"]).0, 3);
    assert_eq!(code(&["fom", "--config", "/nonexistent/dipolatt.json"]).0, 4);
    assert_eq!(code(&["fom", "--out", "/nonexistent/dir/out.json"]).0, 4);
    assert_eq!(code(&["--help"]).0, 0);
}

#[test]
fn worker_count_does_not_change_output() {
    let base = ["sweep", "--geometry", "ellipsoid", "--eta-par", "0.05:0.3:400", "--format", "csv"];
    let one = dipolatt(&[&base[..], &["--workers", "1"]].concat());
    let four = dipolatt(&[&base[..], &["--workers", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let e1 = dipolatt(&["ensemble", "--n-sites", "20000", "--replicas", "4", "--workers", "1"]);
    let e3 = dipolatt(&["ensemble", "--n-sites", "20000", "--replicas", "4", "--workers", "3"]);
    assert_eq!(e1.stdout, e3.stdout);
}

#[test]
fn seeds_control_the_ensemble() {
    let a = ok_json(&["ensemble", "--n-sites", "10000", "--seed", "1"]);
    let b = ok_json(&["ensemble", "--n-sites", "10000", "--seed", "1"]);
    let c = ok_json(&["ensemble", "--n-sites", "10000", "--seed", "2"]);
    assert_eq!(a, b);
    assert_ne!(a["rows"], c["rows"]);
    assert!(a["rows"][0]["rng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn gate_and_budget_values() {
    let doc = ok_json(&["gate", "--kind", "cphase"]);
    let phase = doc["rows"][0]["phase"].as_f64().unwrap();
    assert!((phase.abs() - std::f64::consts::PI).abs() < 1e-9);
    let doc = ok_json(&["gate", "--kind", "sqrt-swap", "--rabi", "0.1"]);
    assert!(doc["rows"][0]["leakage"].as_f64().unwrap() < 1e-10);
    let doc = ok_json(&["fidelity"]);
    let f = doc["rows"][0]["fidelity"].as_f64().unwrap();
    assert!((f - 0.92).abs() < 0.02);
    let d = doc["rows"][0]["lattice_detuning"].as_f64().unwrap();
    assert!((4e3..9e3).contains(&d));
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.csv");
    let out = dipolatt(&["fom", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# version: dipolatt"));
    assert_eq!(csv_table(&text).1.len(), 1);
}
