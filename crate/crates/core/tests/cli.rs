use std::process::Command;

use mconvex::cli::run;
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mconvex").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("not JSON ({e}):\n{text}"))
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn bound_example_passes() {
    let (code, out, _) = invoke(&["bound", "--fn", "power:2", "--a", "0", "--b", "1", "--x", "0.5", "--m", "1", "--q", "2", "--output", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((num(&v, "lhs_abs") - 1.0 / 6.0).abs() < 1e-9);
    assert!((num(&v, "bound_t3") - 0.25).abs() < 1e-12);
    assert!((num(&v, "bound_t4") - 0.330276).abs() < 1e-5);
    assert!((num(&v, "bound_t5") - 0.288675).abs() < 1e-5);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["applicable.t4"], true);
}

#[test]
fn convexity_example_reports_witness_at_origin() {
    let (code, out, err) = invoke(&["convexity", "--fn", "poly:1,0,1", "--m", "0.5", "--hi", "1"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["holds"], false);
    assert_eq!(num(&v, "witness.x"), 0.0);
    assert_eq!(num(&v, "witness.y"), 0.0);
    assert!((num(&v, "witness.gap") - 0.5).abs() < 1e-12);
    assert!(err.contains("m-convexity fails"));
}

#[test]
fn means_example_passes() {
    let (code, out, _) = invoke(&["means", "--a", "1", "--b", "2", "--n", "2", "--m", "1", "--q", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let means = &v["means"];
    assert!((num(means, "prop1.lhs") - 0.1666667).abs() < 1e-7);
    assert_eq!(num(means, "prop1.rhs"), 0.75);
    assert!((num(means, "prop2.rhs") - 0.759664).abs() < 1e-5);
    assert_eq!(means["prop2.holds"], true);
}

#[test]
fn binary_exit_codes_follow_the_contract() {
    let bin = env!("CARGO_BIN_EXE_mconvex");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["bound", "--fn", "power:2", "--a", "0", "--b", "1", "--x", "0.5", "--m", "1", "--q", "2"]), 0);
    assert_eq!(status(&["convexity", "--fn", "poly:1,0,1", "--m", "0.5", "--hi", "1"]), 1);
    assert_eq!(status(&["means", "--a", "1", "--b", "2", "--n", "2", "--m", "1", "--q", "2"]), 0);
    assert_eq!(status(&["bound", "--fn", "power:2", "--a", "1", "--b", "0"]), 2);
    assert_eq!(status(&["frobnicate"]), 2);
}

#[test]
fn json_round_trips() {
    for args in [
        &["bound", "--fn", "exp", "--a", "0", "--b", "1", "--m", "0.5"][..],
        &["identity", "--fn", "power:3", "--a", "0.2", "--b", "1.7", "--x", "0.4"][..],
        &["means", "--a", "1", "--b", "3", "--n", "3", "--m", "0.5", "--q", "1.5"][..],
    ] {
        let (_, out, _) = invoke(args);
        let reserialized = serde_json::to_string_pretty(&json(&out)).unwrap() + "\n";
        assert_eq!(out, reserialized, "{args:?}");
    }
}

#[test]
fn bound_with_failed_precondition_exits_one() {
    let (code, out, _) = invoke(&["bound", "--fn", "exp", "--a", "0", "--b", "1", "--x", "0.5", "--m", "0.5"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["preconditions.t3.holds"], false);
    assert_eq!(v["applicable.t3"], false);
    assert!(v["bound_t3"].as_f64().is_some());
}

#[test]
fn identity_reports_both_sign_conventions() {
    let (code, out, _) = invoke(&["identity", "--fn", "power:2", "--a", "0", "--b", "1", "--x", "0.25"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!(num(&v, "lemma1_residual") < 1e-12);
    assert!((num(&v, "rhs_swapped_signs") + 5.0 / 12.0).abs() < 1e-9);
    assert!((num(&v, "residual_swapped_signs") - 5.0 / 6.0).abs() < 1e-9);
}

#[test]
fn function_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"kind":"power","n":3,"domain_hi":4.0}"#).unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = invoke(&["bound", "--fn-file", p, "--a", "0.5", "--b", "2", "--m", "0.5", "--q", "3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["function"], "u^3");
    assert_eq!(v["status"], "pass");

    std::fs::write(&path, r#"{"kind":"power","n":3}"#).unwrap();
    let (code, _, err) = invoke(&["bound", "--fn-file", p, "--a", "0", "--b", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("bad function spec"));
}

#[test]
fn sweep_config_file_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    let csv_path = dir.path().join("rows.csv");
    std::fs::write(
        &config,
        r#"{
            "functions": [{"kind": "power", "n": 2, "domain_hi": 8.0}, {"kind": "poly", "coeffs": [0, 0, 1, 1], "domain_hi": 8.0}],
            "a_range": [0.0, 2.0],
            "b_range": [0.0, 2.0],
            "x_policy": {"random": 2},
            "m_values": [0.5, 1.0],
            "q_values": [1.0, 2.0],
            "samples": 12,
            "seed": 7,
            "oracle_budget": {"grid_n": 12, "random_n": 500}
        }"#,
    )
    .unwrap();
    let (c, p) = (config.to_str().unwrap(), csv_path.to_str().unwrap());
    let (code, out, _) = invoke(&["sweep", "--config", c, "--csv", p]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["cases_total"], 24);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);

    let mut rows = csv::Reader::from_path(&csv_path).unwrap();
    let headers: Vec<String> = rows.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers,
        ["function", "a", "b", "x", "m", "q", "lhs_abs", "bound_t3", "bound_t4", "bound_t5", "residual", "certified_t3", "certified_t45"]
    );
    assert_eq!(rows.records().count(), 24);

    let (_, serial, _) = invoke(&["sweep", "--config", c, "--serial"]);
    assert_eq!(out, serial);

    std::fs::write(&config, r#"{"functions": []}"#).unwrap();
    let (code, _, _) = invoke(&["sweep", "--config", c]);
    assert_eq!(code, 2);
}
