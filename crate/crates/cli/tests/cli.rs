use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn btiepi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_btiepi"))
        .args(args)
        .output()
        .expect("failed to run btiepi")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

fn fixture() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data/two_units.json")
        .display()
        .to_string()
}

const COST: &str = "exp:100,10,0.5";

#[test]
fn trees_count() {
    let out = btiepi(&["trees", "--n", "4", "--count"]);
    assert!(out.status.success());
    assert_eq!(json(&out), 14);
}

#[test]
fn trees_list_matches_count() {
    let out = btiepi(&["trees", "--n", "5", "--list"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 42);
}

#[test]
fn separate_reports_violation() {
    let out = btiepi(&["separate", "--u", "1,1", "--c", "0", "--pre", "2", "--cost", COST]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let cu = 100.0 * (1.0 - (-1.0f64).exp()) + 10.0;
    let a: Vec<f64> = serde_json::from_value(v["cut"]["a"].clone()).unwrap();
    assert!((a[0] - cu).abs() < 1e-9);
    assert_eq!(a[1], 0.0);
    assert_eq!(v["cut"]["tree"], "(1 (2))");
}

#[test]
fn separate_inside_epigraph() {
    let out = btiepi(&["separate", "--u", "0.5,0.2", "--c", "1000", "--pre", "2", "--cost", COST]);
    assert!(out.status.success());
    assert_eq!(json(&out)["in_epigraph"], true);
}

#[test]
fn facets_three_periods() {
    let out = btiepi(&["facets", "--T", "3", "--cost", COST]);
    assert!(out.status.success());
    let expected: Value = serde_json::from_str(r#"{"distinct_btis":5,"trivial":6,"total":11}"#).unwrap();
    assert_eq!(json(&out), expected);
}

#[test]
fn envelope_certificate_matches_value() {
    let plain = json(&btiepi(&["envelope", "--u", "0.3,0.8,0.1", "--pre", "1", "--cost", COST]));
    let cert = json(&btiepi(&[
        "envelope", "--u", "0.3,0.8,0.1", "--pre", "1", "--certify", "--cost", COST,
    ]));
    let value = plain["value"].as_f64().unwrap();
    assert!((cert["value"].as_f64().unwrap() - value).abs() < 1e-9);
    let a: Vec<f64> = serde_json::from_value(cert["a"].clone()).unwrap();
    let dot: f64 = a.iter().zip([0.3, 0.8, 0.1]).map(|(a, u)| a * u).sum();
    assert!((dot - value).abs() < 1e-9);
}

#[test]
fn cartesian_tree() {
    let v = json(&btiepi(&["tree", "--u", "0.3,0.9,0.1"]));
    assert_eq!(v["tree"], "((1) 2 (3))");
    assert_eq!(v["root"], 2);
}

#[test]
fn oracle_checks_pass() {
    for check in ["validity", "equality", "irredundancy", "separation", "hull"] {
        let out = btiepi(&["oracle", check, "--T", "4", "--seed", "3", "--cost", COST, "--pre", "1"]);
        assert!(out.status.success(), "{check}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["oracle", "separation", "--T", "5", "--seed", "11", "--cost", COST];
    assert_eq!(btiepi(&args).stdout, btiepi(&args).stdout);
}

#[test]
fn build_writes_parsable_lp() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.lp");
    let out = btiepi(&[
        "build",
        "--instance",
        &fixture(),
        "--formulation",
        "3bin",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary = json(&out);
    let lp = btiepi_core::parse_lp(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(summary["columns"], lp.columns().len());
    assert_eq!(summary["rows"], lp.rows().len());
}

#[test]
fn gap_report_fields() {
    let mut mip = None;
    let mut bti_gap = f64::INFINITY;
    let mut others = Vec::new();
    for f in ["1bin", "1bin-star", "3bin", "temp", "bti"] {
        let out = btiepi(&["gap", "--instance", &fixture(), "--formulation", f]);
        assert!(out.status.success(), "{f}");
        let v = json(&out);
        for key in ["lp", "mip", "gap", "cuts", "rounds"] {
            assert!(v.get(key).is_some(), "{f}: missing {key}");
        }
        let z = v["mip"].as_f64().unwrap();
        assert!(mip.is_none_or(|m: f64| (m - z).abs() < 1e-6));
        mip = Some(z);
        assert!(v["lp"].as_f64().unwrap() <= z + 1e-6);
        let gap = v["gap"].as_f64().unwrap();
        if f == "bti" {
            bti_gap = gap;
        } else {
            others.push(gap);
        }
    }
    assert!(others.iter().all(|&g| bti_gap <= g + 1e-6));
}

#[test]
fn demand_override() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("demand.csv");
    std::fs::write(&csv, "330\n300\n350\n380\n420\n400\n380\n320\n").unwrap();
    let base = json(&btiepi(&["gap", "--instance", &fixture(), "--formulation", "1bin"]));
    let out = btiepi(&[
        "gap",
        "--instance",
        &fixture(),
        "--formulation",
        "1bin",
        "--demand",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_ne!(json(&out)["mip"], base["mip"]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(btiepi(&["bogus"]).status.code(), Some(2));
    assert_eq!(btiepi(&["trees", "--n", "x", "--count"]).status.code(), Some(2));
    assert_eq!(btiepi(&["separate", "--u", "1", "--c", "0", "--cost", "nope:1"]).status.code(), Some(2));
    assert_eq!(
        btiepi(&["separate", "--u", "1,1", "--c", "0", "--cost", COST, "--delta", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(btiepi(&["gap", "--instance", "/nonexistent.json", "--formulation", "bti"]).status.code(), Some(2));
}

#[test]
fn pretty_output_is_same_json() {
    let compact = btiepi(&["tree", "--u", "0.5,0.1,0.7"]);
    let pretty = btiepi(&["--pretty", "tree", "--u", "0.5,0.1,0.7"]);
    assert_ne!(compact.stdout, pretty.stdout);
    assert_eq!(json(&compact), json(&pretty));
}
