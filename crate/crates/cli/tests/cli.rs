//! End-to-end tests of the binary: file formats, exit codes, witnesses and
//! report structure.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_framelab"))
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(content.as_bytes()).expect("write temp");
    f
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn cp_fails_on_bundled_five_vector_set_with_known_partition() {
    let out = bin().args(["cp", &fixture("five_vectors_r3.json")]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["holds"], Value::Bool(false));
    assert_eq!(r["result"]["witness"]["subset"], serde_json::json!([1, 5]));
    assert_eq!(r["result"]["witness"]["dim_subset"], 2);
    assert_eq!(r["result"]["witness"]["dim_complement"], 2);
}

#[test]
fn pr_vectors_passes_on_full_spark_family() {
    let out = bin()
        .args(["pr-vectors", &fixture("full_spark_3in2.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["decision"], "pass_exact");
}

#[test]
fn augment_adds_one_vector_to_the_plane_basis() {
    let out = bin()
        .args(["augment", &fixture("two_in_r2.json"), "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["k"], 1);
    assert_eq!(r["result"]["added"].as_array().unwrap().len(), 1);
    assert_eq!(r["result"]["cp_after"], Value::Bool(true));
}

#[test]
fn sheared_subspaces_fail_through_the_cli() {
    let out = bin()
        .args([
            "pr-subspaces",
            &fixture("demo_six_subspaces.json"),
            "--transform",
            &fixture("shear_operator.json"),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["decision"], "fail");
    assert_eq!(r["result"]["arithmetic"], "exact");
    assert_eq!(r["result"]["witness"]["measurement_residual"], 0.0);
}

#[test]
fn text_input_is_a_float_family() {
    let f = write_temp("1 0\n0 1\n1 1\n");
    let out = bin()
        .args(["analyze", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["m"], 3);
    assert_eq!(r["result"]["dim"], 2);
    assert_eq!(r["result"]["mode"], "float");
    assert_eq!(r["result"]["is_frame"], Value::Bool(true));
}

#[test]
fn rational_strings_force_exact_mode() {
    let f = write_temp(r#"{"vectors": [["1/2", "1/2"], ["1", "0"]]}"#);
    let out = bin()
        .args(["analyze", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    let r = report(&out);
    assert_eq!(r["result"]["mode"], "exact");
    assert!(r["result"]["lower_enclosure"].is_array());
}

#[test]
fn ragged_rows_are_a_parse_error() {
    let f = write_temp("1 0\n0 1 1\n");
    let out = bin()
        .args(["cp", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ragged"));
}

#[test]
fn zero_vectors_are_rejected_at_parse() {
    let f = write_temp(r#"{"vectors": [[1, 0], [0, 0]]}"#);
    let out = bin()
        .args(["spark", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero vector"));
}

#[test]
fn oversized_scans_need_force() {
    let rows: Vec<String> = (0..25).map(|i| format!("[\"{}\", \"1\"]", i + 1)).collect();
    let f = write_temp(&format!("{{\"vectors\": [{}]}}", rows.join(",")));
    let out = bin()
        .args(["cp", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("force"));
}

#[test]
fn complex_families_get_the_necessary_condition_only() {
    let f = write_temp(
        r#"{"field": "complex", "vectors": [
            [[1, 0], [0, 1]],
            [[0, 1], [1, 0]],
            [[1, 1], [2, -1]],
            [[2, 0], [1, 3]]
        ]}"#,
    );
    let out = bin()
        .args(["pr-vectors", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "inconclusive maps to exit 3");
    let r = report(&out);
    assert_eq!(r["result"]["decision"], "inconclusive");
}

#[test]
fn naimark_of_square_parseval_has_zero_complement() {
    let f = write_temp(r#"{"vectors": [["1", "0"], ["0", "1"]]}"#);
    let out = bin()
        .args(["naimark", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["zero_complement"], Value::Bool(true));
    assert_eq!(r["result"]["pair_certificate"]["pass"], Value::Bool(true));
}

#[test]
fn emitted_input_echo_round_trips_to_the_same_digest() {
    let out = bin().args(["cp", &fixture("five_vectors_r3.json")]).output().unwrap();
    let r = report(&out);
    let echo = serde_json::to_string(&r["input"]).unwrap();
    let f = write_temp(&echo);
    let again = bin()
        .args(["cp", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    let r2 = report(&again);
    assert_eq!(r["input_digest"], r2["input_digest"]);
    assert_eq!(r["input"], r2["input"]);
}

#[test]
fn norm_retrieval_dispatches_on_input_kind() {
    let out = bin()
        .args(["norm-retrieval", &fixture("two_in_r2.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["decision"], "pass_exact");

    let out = bin()
        .args(["norm-retrieval", &fixture("complement_subspaces.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["decision"], "pass_budgeted");
}

#[test]
fn hyperplane_scan_reports_blocking() {
    let f = write_temp(r#"{"dim": 3, "vectors": [["1","0","0"], ["0","1","0"]]}"#);
    let out = bin()
        .args(["hyperplanes", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["all_hyperplanes"], Value::Bool(false));
    assert_eq!(r["result"]["blocked"], Value::Bool(true));
}

#[test]
fn timing_is_opt_in() {
    let out = bin().args(["cp", &fixture("two_in_r2.json")]).output().unwrap();
    let r = report(&out);
    assert!(r.get("timing_s").is_none());
    let out = bin()
        .args(["cp", &fixture("two_in_r2.json"), "--timings"])
        .output()
        .unwrap();
    let r = report(&out);
    assert!(r["timing_s"].is_number());
}

#[test]
fn reports_are_independent_of_worker_count() {
    let run = |threads: &str| {
        let mut cmd = bin();
        cmd.env("FRAMELAB_THREADS", threads)
            .args(["cp", &fixture("five_vectors_r3.json")]);
        cmd.output().unwrap().stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn fixture_suite_passes() {
    let out = bin().arg("fixture-suite").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS six demo subspaces"));
    assert!(!stdout.contains("FAIL "));
}
