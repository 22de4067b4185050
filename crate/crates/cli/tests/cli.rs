use std::path::Path;
use std::process::Command;

use muskat_cli::commands::{run_evolve, run_fields, FIELD_COLUMNS};
use muskat_cli::{CliError, RunConfig};

fn muskat(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_muskat"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("spawn muskat")
}

const FLAT: &str = r#"{
    "profile": {"kind": "constant", "a": 0.0},
    "run": {"fields": {"points_x1": 5, "points_x2": 9, "slice": {"half_width": 10.0, "points": 41}}}
}"#;

#[test]
fn speed_above_the_layer_bound_exits_with_gate_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fast.json");
    std::fs::write(&cfg, r#"{"speed": {"kind": "constant", "a": 1.95}}"#).unwrap();
    let out = muskat(dir.path(), &["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("muskat:"));
}

#[test]
fn unknown_config_keys_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"mixing": {"layers": 2}}"#).unwrap();
    let out = muskat(dir.path(), &["--config", cfg.to_str().unwrap(), "identities"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = muskat(dir.path(), &["--config", "/nonexistent/muskat.json", "identities"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identities_writes_a_sorted_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = muskat(dir.path(), &["identities"]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("identities.json")).unwrap()).unwrap();
    assert_eq!(v["all_match_doubled"], serde_json::Value::Bool(true));
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn positive_speed_at_infinity_gives_zero_psi() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(r#"{"run": {"evolve": {"rows": 5}}}"#).unwrap();
    let r = run_evolve(&cfg, dir.path()).unwrap();
    assert_eq!(r.rows.len(), 5);
    assert!(r.rows.iter().all(|row| row.psi == [0.0, 0.0] && row.rate == [0.0, 0.0]));
    let text = std::fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# muskat-csv v1"));
    assert_eq!(lines.next(), Some("t,psi1,psi2,h1,h2"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn flat_layers_have_no_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(FLAT).unwrap();
    let summary = run_fields(&cfg, Some(0.05), dir.path()).unwrap();
    assert_eq!(summary.points, 45);
    assert!(summary.max_speed < 1e-12, "max speed {}", summary.max_speed);

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(dir.path().join("fields.csv"))
        .unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, FIELD_COLUMNS);
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        for col in ["u1", "u2"] {
            let k = FIELD_COLUMNS.iter().position(|c| *c == col).unwrap();
            let u: f64 = record[k].parse().unwrap();
            assert!(u.is_nan() || u.abs() < 1e-12);
        }
        rows += 1;
    }
    assert_eq!(rows, 45);
}

#[test]
fn fields_reject_nonpositive_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(FLAT).unwrap();
    assert!(matches!(
        run_fields(&cfg, Some(0.0), dir.path()),
        Err(CliError::Gate(_))
    ));
}
