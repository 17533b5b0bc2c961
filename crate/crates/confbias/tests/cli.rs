//! End-to-end checks of the command-line JSON/CSV surfaces.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_confbias")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn confbias")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "invalid JSON output: {e}\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn star3_file(dir: &tempfile::TempDir) -> String {
    let path = dir.path().join("star3.json");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(f, r#"{{"n":3,"edges":[[0,1],[1,2]]}}"#).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn worth_of_three_star() {
    let dir = tempfile::tempdir().unwrap();
    let graph = star3_file(&dir);
    let out = run(&["worth", "--graph", &graph, "--delta", "1/2"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["worth"]["display"], "4*d + 2*d^2");
    assert_eq!(v["worth"]["value"]["exact"], "5/2");
}

#[test]
fn worth_of_subcoalition() {
    let dir = tempfile::tempdir().unwrap();
    let graph = star3_file(&dir);
    let out = run(&["worth", "--graph", &graph, "--coalition", "0,2"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["worth"]["display"], "0");
}

#[test]
fn myerson_allocation() {
    let dir = tempfile::tempdir().unwrap();
    let graph = star3_file(&dir);
    let out = run(&["myerson", "--graph", &graph]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["payoffs"]["0"]["display"], "1*d + 2/3*d^2");
    assert_eq!(v["payoffs"]["1"]["display"], "2*d + 2/3*d^2");
    assert_eq!(v["total_worth"]["display"], "4*d + 2*d^2");
}

#[test]
fn myerson_with_explicit_structure() {
    let dir = tempfile::tempdir().unwrap();
    let graph = star3_file(&dir);
    let structure = dir.path().join("h.json");
    std::fs::write(&structure, r#"{"hyperedges":[[0,1]]}"#).unwrap();
    let out = run(&[
        "myerson",
        "--graph",
        &graph,
        "--structure",
        structure.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    // only the S-R conference: the pair splits 2d, the witness gets nothing
    assert_eq!(v["payoffs"]["0"]["display"], "1*d");
    assert_eq!(v["payoffs"]["2"]["display"], "0");
}

#[test]
fn bias_component_and_effective() {
    let dir = tempfile::tempdir().unwrap();
    let graph = star3_file(&dir);
    let out = run(&[
        "bias", "--graph", &graph, "--removed", "2", "--subject", "0",
    ]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["component"]["display"], "2/3*d^2");

    let out = run(&[
        "bias", "--graph", &graph, "--sender", "0", "--receiver", "1",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["effective"]["display"], "1*d + 1*d^2");
    assert_eq!(v["witness_terms"].as_array().unwrap().len(), 1);
}

#[test]
fn equilibrium_on_three_star() {
    let dir = tempfile::tempdir().unwrap();
    let graph = star3_file(&dir);
    let out = run(&[
        "equilibrium",
        "--graph",
        &graph,
        "--sender",
        "0",
        "--receiver",
        "1",
        "--delta",
        "1/5",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["bias_value"], "6/25");
    assert_eq!(v["n_partitions"], 2);
    assert_eq!(v["boundaries"][2], "1");
    assert_eq!(v["max_residual"], "0");
}

#[test]
fn scenario_two_star() {
    let out = run(&[
        "scenario", "--k", "2", "--l", "2", "--link-mode", "hub-hub", "--delta", "0.2",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["scenario"]["two_star"]["k"], 2);
    assert!(v["n_partitions"].as_u64().unwrap() >= 1);
}

#[test]
fn scenario_pair_conference() {
    // hubs talking privately on the (2,2) hub-hub join:
    // b^S_R = d + 8/3 d^2 + 2 d^3 = 121/375 at 1/5
    let out = run(&[
        "scenario", "--k", "2", "--l", "2", "--link-mode", "hub-hub", "--conference", "pair",
        "--delta", "1/5",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["bias_value"], "121/375");
}

#[test]
fn curve_csv_shape() {
    let out = run(&["curve", "--curve", "gap", "--k", "2", "--l", "2", "--steps", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,value,label");
    assert_eq!(lines.len(), 10);
    assert!(lines[1].starts_with("0.1,"));
    assert!(lines[1].ends_with(",gap"));
}

#[test]
fn trees_check_small() {
    let out = run(&["trees-check", "--n", "4", "--delta", "1/2"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["pass"], true);
    // star 4.5 vs path 4.25 at delta = 1/2
    assert_eq!(v["worth_range"]["max"], "4.5");
    assert_eq!(v["worth_range"]["min"], "4.25");
}

#[test]
fn errors_are_machine_readable() {
    let out = run(&["worth", "--graph", "/nonexistent/g.json"]);
    assert!(!out.status.success());
    let v = json_of(&out);
    assert!(v["error"].as_str().unwrap().contains("cannot read"));

    let dir = tempfile::tempdir().unwrap();
    let graph = star3_file(&dir);
    let out = run(&[
        "equilibrium", "--graph", &graph, "--sender", "0", "--receiver", "1", "--delta", "3/2",
    ]);
    assert!(!out.status.success());
    assert!(json_of(&out)["error"].as_str().unwrap().contains("(0,1)"));
}

#[test]
fn reproduce_unknown_prop_fails() {
    let out = run(&["reproduce", "prop9.9"]);
    assert!(!out.status.success());
    assert!(json_of(&out)["error"].as_str().unwrap().contains("prop9.9"));
}

#[test]
fn reproduce_fast_targets_pass() {
    for prop in ["prop2.1", "prop3.1", "remark4-exhub"] {
        let out = run(&["reproduce", prop]);
        assert!(out.status.success(), "{prop} failed");
        assert_eq!(json_of(&out)["pass"], true, "{prop}");
    }
}
