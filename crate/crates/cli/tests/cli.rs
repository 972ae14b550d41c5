use std::process::{Command, Output};

use serde_json::Value;

fn rhlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn dims_genus_two_sl2() {
    let out = rhlab(&["dims", "--genus", "2", "--algebra", "sl2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["dim_character_variety"], 6);
    assert_eq!(r["result"]["dim_syst"], 6);
    assert_eq!(r["config"]["seed"], 0);
}

#[test]
fn noether_genus_three_hyperelliptic() {
    let out = rhlab(&["noether", "--branch-points", "0,1,2,3,4,5,6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["verdict"]["verdict"], "not_surjective");
    assert_eq!(r["result"]["verdict"]["rank"], 5);
    assert_eq!(r["result"]["ranks_agree"], true);
}

#[test]
fn zero_ode_tol_is_rejected() {
    let out = rhlab(&["monodromy", "--ode-tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ode_tol"));
}

#[test]
fn zero_ode_tol_in_config_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"ode_tol": 0.0}"#).unwrap();
    let out = rhlab(&["monodromy", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ode_tol"));
}

#[test]
fn malformed_config_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"seed": "seven"}"#).unwrap();
    let out = rhlab(&["dims", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("config"));
    std::fs::write(&path, r#"{"trialz": 3}"#).unwrap();
    let out = rhlab(&["dims", "--config", path.to_str().unwrap()]);
    assert!(stderr(&out).contains("trialz"));
}

#[test]
fn unknown_subcommand_is_a_validation_error() {
    let out = rhlab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("frobnicate"));
}

#[test]
fn infeasible_clearance_names_geometry() {
    let out = rhlab(&["monodromy", "--branch-points", "0,1,2,3,4", "--clearance", "0.6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("clearance"));
}

#[test]
fn reports_are_deterministic_except_timestamp() {
    let args = ["lazarsfeld", "--quartic", "klein", "--trials", "12", "--seed", "9"];
    let mut a = report(&rhlab(&args));
    let mut b = report(&rhlab(&args));
    a["timestamp"] = Value::Null;
    b["timestamp"] = Value::Null;
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn echoed_config_replays_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let out = rhlab(&[
        "criterion",
        "--branch-points=0,1,-6,6,12",
        "--seed",
        "11",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r1: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    assert!(r1["config"]["system"].is_object());
    let mut replay = r1["config"].clone();
    replay["out"] = Value::Null;
    replay["seed"] = 0.into();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, replay.to_string()).unwrap();
    let r2 = report(&rhlab(&["criterion", "--config", cfg.to_str().unwrap()]));
    assert_eq!(r1["result"], r2["result"]);
    assert_eq!(r1["config"]["system"], r2["config"]["system"]);
}

#[test]
fn config_command_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"command": "noether"}"#).unwrap();
    let out = rhlab(&["dims", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("command"));
}

#[test]
fn csv_only_for_tables() {
    let out = rhlab(&["dims", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("format"));
    let out = rhlab(&[
        "lazarsfeld",
        "--branch-points",
        "0,1,2,3,4,5,6",
        "--trials",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,rank,target_dimension,surjective");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.ends_with("false")));
}

#[test]
fn criterion_verdicts_are_data() {
    let out = rhlab(&["criterion", "--branch-points", "0,1,2,3,4,5,6", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["verdict"]["verdict"], "fails");
}

#[test]
fn monodromy_report_has_traces_and_probe() {
    let out = rhlab(&["monodromy", "--branch-points=0,1,-6,6,12", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["result"]["representation"]["valid"], true);
    assert_eq!(r["result"]["traces"]["words"].as_array().unwrap().len(), 11);
    assert!(r["result"]["irreducibility"]["verdict"].is_string());
    assert_eq!(r["result"]["loops"]["loops"].as_array().unwrap().len(), 4);
}

#[test]
fn default_monodromy_curve_is_spread_out() {
    let out = rhlab(&["monodromy", "--genus", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    let pts: Vec<i64> = r["config"]["curve"]["branch_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[0].as_i64().unwrap())
        .collect();
    assert_eq!(pts, vec![0, 1, -6, 6, 12]);
    assert_eq!(r["result"]["representation"]["valid"], true);
}

#[test]
fn invalid_monodromy_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let out = rhlab(&[
        "monodromy",
        "--branch-points=0,1,-6,6,12",
        "--coefficient-bound",
        "5",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("relation residual"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["result"]["representation"]["valid"], false);
}

#[test]
fn immersion_ladder_needs_three_steps() {
    let out = rhlab(&["immersion", "--fd-steps", "1e-2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("fd_step"));
}

#[test]
fn immersion_csv_lists_singular_values() {
    let out = rhlab(&["immersion", "--seed", "5", "--format", "csv", "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 12);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",6")));
}
