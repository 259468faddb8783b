//! End-to-end tests of the `fchordal` binary: every subcommand, every
//! exit code, and the round trips the documents promise.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fchordal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("the binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("the binary spawns");
    child.stdin.as_mut().expect("stdin is piped").write_all(input.as_bytes()).unwrap();
    child.wait_with_output().expect("the binary exits")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("the binary is not killed by a signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|_| panic!("stdout is JSON, got {:?}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr)
        .unwrap_or_else(|_| panic!("stderr is JSON, got {:?}", String::from_utf8_lossy(&out.stderr)))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_doc(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().expect("tmp paths are UTF-8").to_string()
}

/// Circle data: equiproduct chords, V2 at (−3, 0).
const EQUIPRODUCT: &str = r#"{
  "points": {
    "V1": ["2", "0"],
    "P": ["1", "0"],
    "Q": ["-1", "0"],
    "V2": ["-3", "0"]
  },
  "chord_function": { "kind": "equiproduct" },
  "order": 12
}"#;

/// Ellipse data: equireciprocal chords in the symmetric frame; order 2
/// is degenerate and needs an override.
const EQUIRECIPROCAL: &str = r#"{
  "points": {
    "V1": ["2", "0"],
    "P": ["1", "0"],
    "Q": ["-1", "0"],
    "V2": ["-2", "0"]
  },
  "chord_function": { "kind": "equireciprocal" },
  "order": 12
}"#;

/// Symmetric equichordal data; its slope ratio misses the oblique
/// resonance, so only perpendicular and parallel tangents exist.
const EQUICHORDAL: &str = r#"{
  "points": {
    "V1": ["2", "0"],
    "P": ["1", "0"],
    "Q": ["-1", "0"],
    "V2": ["-2", "0"]
  },
  "chord_function": { "kind": "equichordal" },
  "order": 10
}"#;

// -------------------------------------------------------------------
// solve
// -------------------------------------------------------------------

#[test]
fn solve_prints_the_circle_solution() {
    let dir = tmp_dir("solve-circle");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out = run(&["solve", &problem]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["x"][0], "2");
    assert_eq!(doc["x"][2], "-1/5");
    assert_eq!(doc["x"][4], "-1/125");
    assert_eq!(doc["y"][1], "1");
    assert_eq!(doc["u"][1], "1/6");
    assert_eq!(doc["verified_order"], 12);
    assert_eq!(doc["runtime_resonances"], serde_json::json!([]));
    assert_eq!(doc["pivots"][0]["order"], 2);
    assert_eq!(doc["pivots"][0]["u_pivot"], "4");
}

#[test]
fn solve_reads_stdin() {
    let out = run_with_stdin(&["solve", "-", "--order", "4"], EQUIPRODUCT);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["x"][2], "-1/5");
    assert_eq!(doc["x"].as_array().unwrap().len(), 5);
}

#[test]
fn a_degenerate_order_exits_2_with_diagnostics() {
    let dir = tmp_dir("solve-degenerate");
    let problem = write_doc(&dir, "problem.json", EQUIRECIPROCAL);
    let out = run(&["solve", &problem]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_json(&out);
    assert_eq!(err["error"]["code"], "degenerate-order");
    assert_eq!(err["error"]["location"], "order 2");
    assert_eq!(err["diagnostics"]["runtime_resonances"], serde_json::json!([2]));
    assert_eq!(err["diagnostics"]["C"], "1/9");
    assert_eq!(err["diagnostics"]["ratio"], "1/81");
    assert_eq!(err["diagnostics"]["condition_iii"], true);
}

#[test]
fn an_override_resolves_the_degenerate_order() {
    let dir = tmp_dir("solve-override");
    let problem = write_doc(&dir, "problem.json", EQUIRECIPROCAL);
    let out = run(&["solve", &problem, "--override", "2=-1/3"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["x"][2], "-1/3");
    assert_eq!(doc["x"][4], "-1/36");
    assert_eq!(doc["verified_order"], 12);
    assert_eq!(doc["runtime_resonances"], serde_json::json!([2]));
}

#[test]
fn the_gauge_rescales_the_free_coordinate() {
    let dir = tmp_dir("solve-gauge");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out = run(&["solve", &problem, "--order", "6", "--gauge", r#"{"y1":"2"}"#]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    // x_k picks up 2^k against the canonical gauge: -1/5 -> -4/5.
    assert_eq!(doc["y"][1], "2");
    assert_eq!(doc["x"][2], "-4/5");
    assert_eq!(doc["x"][4], "-16/125");
}

#[test]
fn parallel_mode_traces_the_axis() {
    let dir = tmp_dir("solve-parallel");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out = run(&["solve", &problem, "--mode", "parallel", "--order", "6"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    for k in 0..=6 {
        assert_eq!(doc["y"][k], "0", "y_{k} on the axis");
    }
    // u = t/(6 + t): a geometric tail with ratio -1/6.
    assert_eq!(doc["u"][1], "1/6");
    assert_eq!(doc["u"][2], "-1/36");
    assert_eq!(doc["u"][3], "1/216");
}

#[test]
fn oblique_mode_needs_the_slope_resonance() {
    let dir = tmp_dir("solve-oblique");
    let problem = write_doc(&dir, "problem.json", EQUICHORDAL);
    let out = run(&[
        "solve",
        &problem,
        "--mode",
        "oblique",
        "--gauge",
        r#"{"x1":"1","y1":"1"}"#,
    ]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_json(&out);
    assert_eq!(err["error"]["code"], "no-oblique-tangent");
}

#[test]
fn the_float_backend_solves_to_working_precision() {
    let dir = tmp_dir("solve-float");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out = run(&["solve", &problem, "--backend", "float", "--precision", "192", "--order", "6"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let x2: f64 = doc["x"][2].as_str().unwrap().parse().unwrap();
    assert!((x2 + 0.2).abs() < 1e-15, "x_2 = {x2}, expected -1/5");
    assert_eq!(doc["verified_order"], 6);
}

#[test]
fn unknown_document_fields_are_rejected() {
    let dir = tmp_dir("solve-unknown-field");
    let problem = write_doc(
        &dir,
        "problem.json",
        &EQUIPRODUCT.replacen("\"order\": 12", "\"order\": 12,\n  \"extra_knob\": true", 1),
    );
    let out = run(&["solve", &problem]);
    assert_eq!(exit_code(&out), 3);
    let err = stderr_json(&out);
    assert_eq!(err["error"]["code"], "invalid-document");
    let location = err["error"]["location"].as_str().unwrap();
    assert!(location.contains("extra_knob"), "location: {location}");
}

#[test]
fn a_missing_input_file_is_an_io_error() {
    let out = run(&["solve", "/nonexistent/problem.json"]);
    assert_eq!(exit_code(&out), 3);
    assert_eq!(stderr_json(&out)["error"]["code"], "io");
}

#[test]
fn an_override_at_a_regular_order_is_invalid_input() {
    let dir = tmp_dir("solve-bad-override");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out = run(&["solve", &problem, "--override", "3=1/2"]);
    assert_eq!(exit_code(&out), 3);
    assert_eq!(stderr_json(&out)["error"]["code"], "override-at-regular-order");
}

// -------------------------------------------------------------------
// verify
// -------------------------------------------------------------------

#[test]
fn solve_and_verify_round_trip() {
    let dir = tmp_dir("verify-roundtrip");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let solved = run(&["solve", &problem]);
    assert_eq!(exit_code(&solved), 0);
    let solution = write_doc(&dir, "solution.json", &String::from_utf8(solved.stdout).unwrap());

    let out = run(&["verify", &solution, &problem]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["order"], 12);
    assert_eq!(report["verified_order"], 12);
    assert_eq!(report["passed"], true);
}

#[test]
fn the_circle_oracle_recovers_center_and_radius() {
    let dir = tmp_dir("verify-circle");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let solved = run(&["solve", &problem]);
    let solution = write_doc(&dir, "solution.json", &String::from_utf8(solved.stdout).unwrap());

    let out = run(&["verify", &solution, &problem, "--oracle", "circle"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["oracle"]["kind"], "circle");
    assert_eq!(report["oracle"]["matches"], true);
    assert_eq!(report["oracle"]["center_x"], "-1/2");
    assert_eq!(report["oracle"]["radius"], "5/2");
}

#[test]
fn the_ellipse_oracle_matches_the_override_solution() {
    let dir = tmp_dir("verify-ellipse");
    let problem = write_doc(&dir, "problem.json", EQUIRECIPROCAL);
    let solved = run(&["solve", &problem, "--override", "2=-1/3"]);
    assert_eq!(exit_code(&solved), 0);
    let solution = write_doc(&dir, "solution.json", &String::from_utf8(solved.stdout).unwrap());

    let out = run(&["verify", &solution, &problem, "--oracle", "ellipse"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["oracle"]["kind"], "ellipse");
    assert_eq!(report["oracle"]["matches"], true);
    assert_eq!(report["oracle"]["semi_axis"], "2");
}

#[test]
fn verify_rejects_a_tampered_solution() {
    let dir = tmp_dir("verify-tampered");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let solved = run(&["solve", &problem, "--order", "8"]);
    let mut doc: Value = serde_json::from_slice(&solved.stdout).unwrap();
    doc["x"][4] = Value::String("1/7".to_string());
    let solution = write_doc(&dir, "solution.json", &doc.to_string());

    let out = run(&["verify", &solution, &problem]);
    assert_eq!(exit_code(&out), 4);
    let report = stdout_json(&out);
    assert_eq!(report["passed"], false);
    assert_eq!(report["verified_order"], 3);
}

#[test]
fn the_oracle_flags_a_non_circle() {
    let dir = tmp_dir("verify-non-circle");
    let problem = write_doc(&dir, "problem.json", EQUIRECIPROCAL);
    let solved = run(&["solve", &problem, "--override", "2=-1/3"]);
    let solution = write_doc(&dir, "solution.json", &String::from_utf8(solved.stdout).unwrap());

    // The ellipse solves the problem but is not a circle: residual
    // verification passes, the oracle comparison does not.
    let out = run(&["verify", &solution, &problem, "--oracle", "circle"]);
    assert_eq!(exit_code(&out), 4);
    let report = stdout_json(&out);
    assert_eq!(report["verified_order"], 12);
    assert_eq!(report["oracle"]["matches"], false);
    assert_eq!(report["oracle"]["mismatch_order"], 4);
    assert_eq!(report["passed"], false);
}

// -------------------------------------------------------------------
// gc-check
// -------------------------------------------------------------------

const JOIN_OK: &str = r#"{
  "order": 4,
  "left":  { "x": ["0", "1", "0", "0", "0"], "y": ["0", "0", "1", "0", "0"] },
  "right": { "x": ["0", "2", "1", "0", "0"], "y": ["0", "0", "4", "4", "1"] }
}"#;

#[test]
fn gc_check_solves_the_reparametrization() {
    let dir = tmp_dir("gc-ok");
    let join = write_doc(&dir, "join.json", JOIN_OK);
    let out = run(&["gc-check", &join]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["status"], "success");
    assert_eq!(report["u"], serde_json::json!(["0", "2", "1", "0", "0"]));
    assert_eq!(report["orientation_reversing"], false);
}

#[test]
fn gc_check_locates_the_breaking_order() {
    let dir = tmp_dir("gc-broken");
    let join = write_doc(&dir, "join.json", &JOIN_OK.replacen("\"4\", \"1\"", "\"5\", \"1\"", 1));
    let out = run(&["gc-check", &join]);
    assert_eq!(exit_code(&out), 4);
    let report = stdout_json(&out);
    assert_eq!(report["status"], "failure");
    assert_eq!(report["order"], 3);
    assert_eq!(report["coordinate"], "y");
    assert_eq!(report["max_verified"], 2);
}

#[test]
fn gc_check_rejects_arcs_with_different_vertices() {
    let dir = tmp_dir("gc-vertex");
    let join = write_doc(
        &dir,
        "join.json",
        r#"{
  "order": 2,
  "left":  { "x": ["0", "1", "0"], "y": ["0", "0", "1"] },
  "right": { "x": ["1", "1", "0"], "y": ["0", "0", "1"] }
}"#,
    );
    let out = run(&["gc-check", &join]);
    assert_eq!(exit_code(&out), 4);
    assert_eq!(stderr_json(&out)["error"]["code"], "vertex-mismatch");
}

// -------------------------------------------------------------------
// riordan
// -------------------------------------------------------------------

const PASCAL: &str = r#"{
  "d": ["1", "1", "1", "1", "1", "1"],
  "h": ["0", "1", "1", "1", "1", "1"],
  "order": 5
}"#;

#[test]
fn riordan_prints_an_aligned_triangle() {
    let dir = tmp_dir("riordan-text");
    let matrix = write_doc(&dir, "pascal.json", PASCAL);
    let out = run(&["riordan", &matrix]);
    assert_eq!(exit_code(&out), 0);
    let expected = "1\n1  1\n1  2   1\n1  3   3   1\n1  4   6   4  1\n1  5  10  10  5  1\n";
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn riordan_emits_the_lower_triangle_as_json() {
    let dir = tmp_dir("riordan-json");
    let matrix = write_doc(&dir, "pascal.json", PASCAL);
    let out = run(&["riordan", &matrix, "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["order"], 5);
    assert_eq!(doc["rows"][5], serde_json::json!(["1", "5", "10", "10", "5", "1"]));
    assert_eq!(doc["rows"][0], serde_json::json!(["1"]));
}

#[test]
fn riordan_rejects_series_shorter_than_the_order() {
    let dir = tmp_dir("riordan-short");
    let matrix = write_doc(
        &dir,
        "short.json",
        r#"{ "d": ["1", "1"], "h": ["0", "1"], "order": 5 }"#,
    );
    let out = run(&["riordan", &matrix]);
    assert_eq!(exit_code(&out), 3);
    assert_eq!(stderr_json(&out)["error"]["code"], "riordan");
}

// -------------------------------------------------------------------
// sample
// -------------------------------------------------------------------

#[test]
fn sample_emits_exact_csv_rows() {
    let dir = tmp_dir("sample-csv");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out = run(&["sample", &problem, "--count", "5", "--t-max", "1/10"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "t,x,y");
    assert_eq!(lines[3], "0,2,0");
    // The two ends are mirror images of each other.
    assert_eq!(
        lines[5],
        "1/10,48779277328109357479/24414062500000000000,1/10"
    );
    assert_eq!(
        lines[1],
        "-1/10,48779277328109357479/24414062500000000000,-1/10"
    );
}

#[test]
fn sample_draws_both_arcs_and_all_four_points() {
    let dir = tmp_dir("sample-svg");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out = run(&["sample", &problem, "--format", "svg", "--count", "9"]);
    assert_eq!(exit_code(&out), 0);
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert_eq!(svg.matches("<polyline").count(), 2, "near and far arcs");
    assert_eq!(svg.matches("<line").count(), 1, "the axis");
    for label in ["V1", "P", "Q", "V2"] {
        assert!(svg.contains(&format!(">{label}</text>")), "label {label}");
    }
}

#[test]
fn sample_writes_to_a_file() {
    let dir = tmp_dir("sample-output");
    let problem = write_doc(&dir, "problem.json", EQUIPRODUCT);
    let out_path = dir.join("arc.csv");
    let out = run(&[
        "sample",
        &problem,
        "--count",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("t,x,y\n"));
}

// -------------------------------------------------------------------
// batch
// -------------------------------------------------------------------

#[test]
fn batch_solves_a_directory_and_keeps_documents_separate() {
    let dir = tmp_dir("batch-in");
    let out_dir = tmp_dir("batch-out");
    write_doc(&dir, "a.json", EQUIPRODUCT);
    write_doc(&dir, "b.json", EQUIRECIPROCAL);
    write_doc(&dir, "ignored.txt", "not a document");

    let out = run(&[
        "solve",
        "--batch",
        dir.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    // The worst per-document failure (the degenerate order) sets the code.
    assert_eq!(exit_code(&out), 2);
    let summary = stdout_json(&out);
    assert_eq!(summary["total"], 2);
    assert_eq!(summary["solved"], 1);
    assert_eq!(summary["failed"], 1);

    let solved: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("a.solution.json")).unwrap())
            .unwrap();
    assert_eq!(solved["x"][2], "-1/5");
    let failed: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("b.error.json")).unwrap())
            .unwrap();
    assert_eq!(failed["error"]["code"], "degenerate-order");
}
