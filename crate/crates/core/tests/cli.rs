use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mulbasis")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn corpus(name: &str) -> String {
    path(&format!("corpus/{name}.json")).display().to_string()
}

fn fixture(name: &str) -> String {
    path(&format!("fixtures/{name}.json")).display().to_string()
}

#[test]
fn analyze_clean_entries_exit_zero() {
    for name in ["d1_hom", "d2_chain", "d3_double", "two_step", "primes_only", "diag_one_double", "three_doubles"] {
        let out = run(&["analyze", &corpus(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["command"], "analyze");
        assert!(v["stages"].as_array().unwrap().iter().all(|s| s["status"] == "ok"));
    }
}

#[test]
fn normalize_two_step() {
    let out = run(&["normalize", &corpus("two_step")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["final"]["kind"], "basis");
    assert_eq!(v["final"]["rank"], 2);
    assert_eq!(v["final"]["verification"]["accepted"], true);
}

#[test]
fn primes_only_keeps_rank_one() {
    let v = json(&run(&["normalize", &corpus("primes_only")]));
    assert_eq!(v["final"]["rank"], 1);
    let rescale = v["stages"].as_array().unwrap().iter().find(|s| s["name"] == "rescale").unwrap();
    assert!(rescale["payload"]["rows"].as_array().unwrap().is_empty());
}

#[test]
fn obstructed_entry_reports_weight_function() {
    let out = run(&["normalize", &fixture("obstructed")]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let obs = v["final"]["obstructions"].as_array().unwrap();
    assert_eq!(obs.len(), 1);
    assert!(obs[0]["z"].as_object().unwrap().values().any(|z| z.as_i64() != Some(0)));

    let out = run(&["certify", &fixture("obstructed")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["final"]["kind"], "obstruction");
}

#[test]
fn certify_clean_entry() {
    let out = run(&["certify", &corpus("three_doubles")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["final"]["obstructions"].as_array().unwrap().is_empty());
}

#[test]
fn lemma_violation_exits_two() {
    let out = run(&["analyze", &fixture("mut_lemma7_two")]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let poset = v["stages"].as_array().unwrap().iter().find(|s| s["name"] == "poset").unwrap();
    assert_eq!(poset["status"], "certified-violation");
    assert_eq!(poset["payload"]["certificates"][0]["lemma"], "lemma7");
}

#[test]
fn dimension_four_is_certified() {
    let out = run(&["analyze", &fixture("dim4")]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["stages"][1]["name"], "filtration");
}

#[test]
fn invalid_input_exits_one() {
    let out = run(&["analyze", &fixture("malformed")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = run(&["analyze", &fixture("not_closed")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["stages"][0]["payload"]["issues"][0]["kind"], "closure");

    let out = run(&["analyze", "/nonexistent/input.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn witness_families() {
    let out = run(&["witness", "--family", "lemma2", "--params", "0,1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["members"].as_array().unwrap().len(), 3);
    assert_eq!(v["results"].as_array().unwrap().len(), 6);

    let out = run(&["witness", "--family", "lemma8", "--params", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["members"][0]["matrix"].as_array().unwrap().len(), 20);

    let out = run(&["witness", "--family", "lemma5", "--params", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn field_override() {
    let out = run(&["--field", "F5", "normalize", &corpus("two_step")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["final"]["presentation"]["field"]["Fp"], 5);
}

#[test]
fn normalize_output_verifies() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["two_step", "three_doubles", "diag_one_double"] {
        let file = dir.path().join(format!("{name}.json"));
        let file = file.to_str().unwrap();
        let out = run(&["--output", file, "normalize", &corpus(name)]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        let out = run(&["verify", file]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(json(&out)["accepted"], true);
    }
}

#[test]
fn verify_field_dependence() {
    let basis = fixture("two_chains_basis");
    assert_eq!(run(&["--field", "F2", "verify", &basis]).status.code(), Some(0));
    assert_eq!(run(&["verify", &basis]).status.code(), Some(2));
}

#[test]
fn symbolic_mode() {
    let out = run(&["--mode", "symbolic", "normalize", &corpus("d3_double")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let double = v["final"]["morphisms"].as_array().unwrap().iter().find(|m| m["kind"] == "double").unwrap().clone();
    assert!(double["parameter"].as_str().unwrap().contains("λ_1"));
}
