use std::collections::HashSet;
use std::fs::File;
use std::path::Path;
use std::process::{Command, Output};

use moser_lab::catalog::catalog;
use moser_lab::report::{read_csv, RunReport};
use serde_json::Value;
use tempfile::TempDir;

fn moser_lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moser-lab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run_scenario(id: &str, dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--scenario", id];
    args.extend_from_slice(extra);
    moser_lab(&args, dir)
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
}

#[test]
fn list_shows_every_scenario_once() {
    let dir = TempDir::new().unwrap();
    let out = moser_lab(&["list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let listed: Vec<&str> = text.lines().skip(1).filter_map(|l| l.split_whitespace().next()).collect();
    let unique: HashSet<&str> = listed.iter().copied().collect();
    assert_eq!(unique.len(), listed.len());
    for id in [
        "constant_hom",
        "circle_in_su2_conjugated",
        "shear_line_r1_to_r2",
        "line_in_heisenberg_conjugated",
        "weak_trivial_inner",
        "so2_in_so3_tilt",
        "line_rotation_in_r2",
    ] {
        assert!(unique.contains(id), "{id} missing from list");
    }
    assert_eq!(listed.len(), catalog().len());
}

#[test]
fn matching_verdict_exits_zero_and_writes_both_files() {
    let dir = TempDir::new().unwrap();
    let out = run_scenario("circle_in_su2_conjugated", dir.path(), &["--eps-steps", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = RunReport::read_json(File::open(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.verdict, "TriviallyCertified");
    assert_eq!(report.epsilon.len(), 21);
    assert_eq!(report.config.eps_steps, 20);
    assert!(report.g_path.iter().all(Option::is_some));
    assert!(dir.path().join("residuals.csv").exists());
}

#[test]
fn csv_and_json_carry_the_same_arrays() {
    let dir = TempDir::new().unwrap();
    for id in ["circle_in_su2_conjugated", "shear_line_r1_to_r2"] {
        let out = run_scenario(id, dir.path(), &["--out", "r.json", "--residuals", "r.csv"]);
        assert_eq!(out.status.code(), Some(0));
        let report = RunReport::read_json(File::open(dir.path().join("r.json")).unwrap()).unwrap();
        let [eps, cocycle, trans, conj] = read_csv(File::open(dir.path().join("r.csv")).unwrap()).unwrap();
        assert!(same(&eps, &report.epsilon), "{id}");
        assert!(same(&cocycle, &report.cocycle_defect), "{id}");
        assert!(same(&trans, &report.transgression_residual), "{id}");
        assert!(same(&conj, &report.conjugation_error), "{id}");
    }
}

#[test]
fn unmeasured_values_are_null_in_json() {
    let dir = TempDir::new().unwrap();
    let out = run_scenario("shear_line_r1_to_r2", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let raw: Value = serde_json::from_reader(File::open(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(raw["verdict"], "NotTransgressible");
    assert!(raw["conjugation_error"].as_array().unwrap().iter().all(Value::is_null));
    assert!(raw["g_path"].as_array().unwrap().iter().all(Value::is_null));
    assert!(raw["failing_eps"].as_f64() == Some(0.0));
}

#[test]
fn reports_are_reproducible_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let json = format!("{name}.json");
        let csv = format!("{name}.csv");
        let out = run_scenario("so2_in_so3_tilt", dir.path(), &["--seed", "11", "--out", &json, "--residuals", &csv]);
        assert_eq!(out.status.code(), Some(0));
        let mut raw: Value = serde_json::from_reader(File::open(dir.path().join(&json)).unwrap()).unwrap();
        raw["wall_time"] = Value::Null;
        reports.push((raw, std::fs::read(dir.path().join(&csv)).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0].0["config"]["seed"], 11);
}

#[test]
fn spec_file_overrides_defaults() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("spec.json"),
        r#"{"scenario_id": "line_in_heisenberg_conjugated", "eps_steps": 8, "tolerances": {"certificate_tol": 1e-3}}"#,
    )
    .unwrap();
    let out = moser_lab(&["run", "spec.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = RunReport::read_json(File::open(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.epsilon.len(), 9);
    assert_eq!(report.config.tolerances.certificate_tol, 1e-3);
    assert_eq!(report.config.tolerances.transgression_tol, 1e-6);
}

#[test]
fn verdict_mismatch_exits_one() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("strict.json"),
        r#"{"scenario_id": "circle_in_su2_conjugated", "eps_steps": 10, "tolerances": {"certificate_tol": 1e-300}}"#,
    )
    .unwrap();
    let out = moser_lab(&["run", "strict.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report = RunReport::read_json(File::open(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.verdict, "FlowDiverged");
    assert!(!report.verdict_matches());
}

#[test]
fn bad_input_exits_two_with_a_diagnostic() {
    let dir = TempDir::new().unwrap();
    let specs = [
        ("unknown_field.json", r#"{"scenario_id": "constant_hom", "colour": 3}"#),
        ("unknown_id.json", r#"{"scenario_id": "no_such_scenario"}"#),
        ("custom.json", r#"{"scenario_id": "custom"}"#),
        ("bad_tol.json", r#"{"scenario_id": "constant_hom", "tolerances": {"hom_tol": -1.0}}"#),
        ("wrong_kind.json", r#"{"scenario_id": "constant_hom", "kind": "Subgroup"}"#),
        ("not_json.json", "scenario_id = constant_hom"),
    ];
    for (name, body) in specs {
        std::fs::write(dir.path().join(name), body).unwrap();
        let out = moser_lab(&["run", name], dir.path());
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{name}");
    }
    let out = moser_lab(&["run", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run_scenario("constant_hom", dir.path(), &["--eps-max", "5.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn constant_family_reports_vanishing_residuals() {
    let dir = TempDir::new().unwrap();
    let out = run_scenario("constant_hom", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let report = RunReport::read_json(File::open(dir.path().join("report.json")).unwrap()).unwrap();
    let n = report.config.eps_steps + 1;
    for column in [&report.cocycle_defect, &report.transgression_residual, &report.conjugation_error] {
        assert_eq!(column.len(), n);
        assert!(column.iter().all(|v| *v <= 1e-12));
    }
}

#[test]
fn verdicts_agree_with_the_echoed_thresholds() {
    let dir = TempDir::new().unwrap();
    for id in ["line_in_heisenberg_conjugated", "heisenberg_line_tilt", "line_rotation_in_r2"] {
        let out = run_scenario(id, dir.path(), &[]);
        assert_eq!(out.status.code(), Some(0), "{id}");
        let r = RunReport::read_json(File::open(dir.path().join("report.json")).unwrap()).unwrap();
        let tol = r.config.tolerances;
        let transgressed = r.transgression_residual.iter().all(|v| *v <= tol.transgression_tol);
        let conjugated = r.conjugation_error.iter().all(|v| *v <= tol.certificate_tol);
        assert_eq!(r.verdict == "TriviallyCertified", transgressed && conjugated, "{id}");
        assert_eq!(r.verdict == "NotTransgressible", !transgressed, "{id}");
    }
}
