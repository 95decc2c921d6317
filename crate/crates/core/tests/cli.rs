use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use input_redundancy::scenario::ScenarioFile;
use serde_json::Value;

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ir-redundancy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn every_example_scenario_round_trips() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            let file = ScenarioFile::load(&p).unwrap();
            let again = ScenarioFile::from_json_str(&file.to_json_string().unwrap()).unwrap();
            assert_eq!(file, again, "{}", p.display());
            seen += 1;
        }
    }
    assert!(seen >= 8);
}

#[test]
fn analyze_reports_the_constrained_kind() {
    let out = run(&["analyze", path(&example("ex4.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "Kind2");
    assert_eq!(report["degree"], serde_json::json!([0, 1]));
    assert_eq!(report["unconstrained_kind"], "Kind3");
    assert_eq!(report["uniform"], true);
}

#[test]
fn analyze_with_pinned_bases_agrees() {
    let plain = stdout_json(&run(&["analyze", path(&example("ex4.json"))]));
    let pinned = stdout_json(&run(&["analyze", "--pin-bases", path(&example("ex4.json"))]));
    assert_eq!(plain["degree"], pinned["degree"]);
}

#[test]
fn analyze_text_mentions_the_kind() {
    let out = run(&["analyze", "--text", path(&example("buck_unconstrained.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2nd kind"));
}

#[test]
fn analyze_refuses_boxes() {
    let out = run(&["analyze", path(&example("buck_certify.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["analyze", path(&bad)]).status.code(), Some(3));
}

#[test]
fn dimension_errors_have_their_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("dims.json");
    std::fs::write(
        &bad,
        r#"{"system": {"A": [[1]], "B": [[1, 0]], "C": [[1]], "D": [[0]]},
            "constraints": {"u": {"kind": "full", "dim": 2}, "x": {"kind": "full", "dim": 1}}}"#,
    )
    .unwrap();
    assert_eq!(run(&["analyze", path(&bad)]).status.code(), Some(6));
}

#[test]
fn certify_buck_ramp() {
    let out = run(&["certify", path(&example("buck_certify.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let cert = stdout_json(&out);
    assert!(cert["route"]["LoopThroughR"].is_object());
    assert!(cert["alpha"].as_f64().unwrap() > 0.0);
    assert!(cert["verification"]["y_sup_diff"].as_f64().unwrap() <= 1e-6);
    assert_eq!(cert["verification"]["admissible_both"], true);
}

#[test]
fn certify_with_impossible_tolerance_fails_verification() {
    let out = run(&["certify", "--tol", "1e-30", path(&example("buck_certify.json"))]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn certify_zero_nominal_is_inconclusive() {
    let out = run(&["certify", "--boundary-residence", path(&example("buck_zero_nominal.json"))]);
    assert_eq!(out.status.code(), Some(4));
    let body = stdout_json(&out);
    assert_eq!(body["status"], "inconclusive");
    assert_eq!(body["boundary_residence"], true);
}

#[test]
fn certify_rejects_an_inadmissible_nominal() {
    let out = run(&["certify", path(&example("ex2.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("violates"));
}

#[test]
fn simulate_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("ex2.csv");
    let out = run(&["simulate", path(&example("ex2.json")), "--out", path(&csv_path)]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["t", "u1", "x1", "y1"]);
    assert_eq!(reader.records().count(), 1001);
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ex2.csv.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["admissible"], false);
    let t = summary["first_violation"].as_f64().unwrap();
    assert!((t - std::f64::consts::LN_2).abs() <= 2e-3);
}

#[test]
fn simulate_overrides_take_precedence() {
    let out = run(&["simulate", path(&example("ex2.json")), "--x0", "0", "--horizon", "0.5", "--dt", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 52);
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"admissible\": true"));
}

#[test]
fn simulate_picks_named_signals() {
    let dir = tempfile::tempdir().unwrap();
    let out4 = dir.path().join("u4.csv");
    let out6 = dir.path().join("u6.csv");
    let ex5 = example("ex5.json");
    assert_eq!(run(&["simulate", path(&ex5), "--out", path(&out4)]).status.code(), Some(0));
    assert_eq!(run(&["simulate", path(&ex5), "--nominal", "u6", "--out", path(&out6)]).status.code(), Some(0));
    let last_y = |p: &Path| -> f64 {
        let mut r = csv::Reader::from_path(p).unwrap();
        let rec = r.records().last().unwrap().unwrap();
        rec[rec.len() - 1].parse().unwrap()
    };
    assert!(last_y(&out4).abs() < 1e-12);
    assert!(last_y(&out6).abs() < 1e-12);
}

#[test]
fn synthesize_picks_the_route_from_the_kernel() {
    let out = run(&["synthesize", path(&example("ex1_u2.json")), "--window", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("LoopThroughR"));
    let out = run(&["synthesize", path(&example("ex5.json")), "--window", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("KernelBump"));
}

#[test]
fn synthesize_loop_for_buck() {
    let out = run(&["synthesize", path(&example("buck_certify.json")), "--window", "0.2,0.8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,u_hat1,u_hat2,x_hat1,x_hat2,x_hat3"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("LoopThroughR"));
}

#[test]
fn several_files_go_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("reports");
    let out = run(&[
        "analyze",
        path(&example("ex4.json")),
        path(&example("buck_unconstrained.json")),
        "--jobs",
        "2",
        "--out",
        path(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for stem in ["ex4", "buck_unconstrained"] {
        let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join(format!("{stem}.json"))).unwrap()).unwrap();
        assert_eq!(report["kind"], "Kind2");
    }
}

#[test]
fn worst_exit_code_wins_across_files() {
    let out = run(&["analyze", path(&example("ex4.json")), path(&example("ex2.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_case_i_corroborates_boundary_residence() {
    let out = run(&["certify", "--boundary-residence", path(&example("ex1_case_i.json"))]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stdout_json(&out)["boundary_residence"], true);
}

fn y_column(p: &Path) -> Vec<f64> {
    let out = run(&["simulate", path(p)]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let col = reader.headers().unwrap().iter().position(|h| h == "y1").unwrap();
    reader.records().map(|r| r.unwrap()[col].parse().unwrap()).collect()
}

#[test]
fn simulated_outputs_of_two_inputs_agree() {
    let a = y_column(&example("ex1_u2.json"));
    let b = y_column(&example("ex1_u3.json"));
    assert_eq!(a.len(), b.len());
    let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(gap <= 1e-6, "gap {gap}");
}

#[test]
fn zero_input_from_rest_stays_at_zero() {
    let out = run(&["simulate", path(&example("buck_zero_nominal.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert!(rec.iter().skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
}
