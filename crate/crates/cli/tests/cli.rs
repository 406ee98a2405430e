use std::process::Command;

use num_complex::Complex64;
use regcauchy_cli::commands::parse_complex;
use regcauchy_cli::report::{emit_report, to_csv, to_json, Format, GridRow, Report, ReportRecord};
use regcauchy_cli::spec::{load_measure_spec, MeasureSpec};
use regcauchy_cli::CliError;

const DOC: &str = "\
# atoms and two densities
atoms: [(1, 1), (-2.5, 0.5)]
density: power, support: [0, inf), c: 1.5, alpha: 0.5
density: power-log, support: [1, inf), c: 1, alpha: 0, log: 1   # trailing comment
example: two-slope, a: 1, b: 2
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regcauchy"))
}

#[test]
fn spec_round_trip_preserves_the_measure() {
    let spec = MeasureSpec::parse(DOC).unwrap();
    let again = MeasureSpec::parse(&spec.to_text()).unwrap();
    assert_eq!(spec, again);
    assert_eq!(spec.to_measure().unwrap(), again.to_measure().unwrap());
    assert_eq!(spec.to_measure().unwrap(), load_measure_spec(DOC).unwrap());
}

#[test]
fn parse_errors_carry_line_and_column() {
    let err = MeasureSpec::parse("atoms: [(1, 1)]\n\ndensity: power, support: [0, inf), c: one, alpha: 1").unwrap_err();
    match err {
        CliError::Parse { line, column, .. } => assert_eq!((line, column), (3, 39)),
        other => panic!("{other}"),
    }
    let err = MeasureSpec::parse("widgets: 3").unwrap_err();
    assert!(matches!(err, CliError::Parse { line: 1, column: 1, .. }), "{err}");
    assert!(err.to_string().starts_with("line 1, column 1"));
}

#[test]
fn negative_mass_is_an_invalid_measure() {
    let err = load_measure_spec("atoms: [(1, -1)]").unwrap_err();
    assert!(matches!(err, CliError::InvalidMeasure(_)), "{err}");
    assert!(err.to_string().starts_with("invalid-measure"));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn complex_arguments() {
    assert_eq!(parse_complex("0+2i").unwrap(), Complex64::new(0.0, 2.0));
    assert_eq!(parse_complex("-1.5-i").unwrap(), Complex64::new(-1.5, -1.0));
    assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
    assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
    assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
    assert!(parse_complex("2+").is_err());
}

#[test]
fn empty_report_is_an_empty_list() {
    let json: serde_json::Value = serde_json::from_str(&to_json(&Report::default())).unwrap();
    assert_eq!(json, serde_json::json!({ "experiments": [] }));
}

#[test]
fn one_row_csv() {
    let mut rec = ReportRecord::new("one");
    rec.grid.push(GridRow {
        y: 10.0,
        re: 1.0,
        im: 2.0,
        predicted_re: None,
        predicted_im: Some(2.0),
    });
    let text = to_csv(&Report { experiments: vec![rec] });
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "y,re,im,predicted_re,predicted_im");
    assert_eq!(lines[1].split(',').count(), 5);
}

#[test]
fn reports_are_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/report.json");
    let mut rec = ReportRecord::new("x");
    rec.check("c", 1.0, 1.0, 0.0, false);
    let written = emit_report(&Report { experiments: vec![rec] }, Format::Json, &path).unwrap();
    assert_eq!(written, vec![path.clone()]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["experiments"][0]["checks"][0]["pass"], true);
    assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
}

#[test]
fn two_slope_example_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("two.json");
    let status = bin()
        .args(["examples", "run", "two-slope", "--a", "1", "--b", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let checks = json["experiments"][0]["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn output_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .env("REGCAUCHY_OUT_DIR", dir.path())
        .args(["--format", "csv", "examples", "run", "two-slope"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("example-two-slope.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn exit_codes() {
    let unknown = bin().args(["examples", "run", "two-slope", "--bogus"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let missing = bin().args(["invert", "--spec", "/nonexistent/spec", "--a", "0", "--b", "1"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    std::fs::write(&spec, "atoms: [(0, -1)]\n").unwrap();
    let invalid = bin().args(["transform", "eval", "--z", "0+1i", "--spec"]).arg(&spec).output().unwrap();
    assert_eq!(invalid.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("invalid-measure"));
    let strict = bin()
        .args(["--tol", "1e-12", "examples", "run", "two-slope"])
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn transform_and_inversion_from_a_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("m.spec");
    std::fs::write(&spec, "atoms: [(1, 1), (-2, 0.5)]\ndensity: power, support: [0, inf), c: 1.5, alpha: 0.5\n").unwrap();
    let eval = bin().args(["transform", "eval", "--z", "0+2i", "--spec"]).arg(&spec).output().unwrap();
    assert_eq!(eval.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&eval.stdout).starts_with("value: "));
    let inv = bin().args(["invert", "--a", "0.5", "--b", "3", "--spec"]).arg(&spec).output().unwrap();
    assert_eq!(inv.status.code(), Some(0), "{}", String::from_utf8_lossy(&inv.stdout));
}
