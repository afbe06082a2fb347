//! End-to-end checks of the command-line surface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spooky-pebble"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

const EXAMPLE_DAG: &str = "a c\nb d\nc e\nd e\n";
const FIG6_STRATEGY: &str = "pebble a\npebble c\nunpebble a\npebble b\npebble d\nunpebble b\n\
pebble e\nghost c\npebble b\nunpebble d\nunpebble b\npebble a\nunghost c\nunpebble c\nunpebble a\n";

#[test]
fn validate_reports_costs() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    let strat = write(dir.path(), "strategy.txt", FIG6_STRATEGY);
    let out = run(&["validate", &dag, &strat]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json, serde_json::json!({"pebbles": 3, "ghosts": 1, "time": 15}));
}

#[test]
fn validate_rejects_broken_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    // Drop one move from the middle: replay fails with the rule and index.
    let broken: String = FIG6_STRATEGY
        .lines()
        .enumerate()
        .filter(|(i, _)| *i != 4)
        .map(|(_, l)| format!("{l}\n"))
        .collect();
    let strat = write(dir.path(), "strategy.txt", &broken);
    let out = run(&["validate", &dag, &strat]);
    assert!(!out.status.success());
    let message = String::from_utf8_lossy(&out.stderr);
    assert!(message.contains("illegal move at index"), "stderr: {message}");
}

#[test]
fn validate_semantics_inclusion() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    let rev = "pebble a\npebble b\npebble c\npebble d\nunpebble a\npebble e\nunpebble d\n\
unpebble b\npebble a\nunpebble c\nunpebble a\n";
    let strat = write(dir.path(), "strategy.txt", rev);
    for semantics in ["reversible", "spooky"] {
        let out = run(&["validate", &dag, &strat, "--semantics", semantics]);
        assert!(out.status.success(), "{semantics}");
    }
}

#[test]
fn solve_writes_valid_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    let out_path = dir.path().join("strategy.txt");
    let out = run(&[
        "solve",
        &dag,
        "--pebbles",
        "3",
        "--ghosts",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // stdout carries one point per line: the raw solution plus 5 optimizer runs.
    let stdout = String::from_utf8_lossy(&out.stdout);
    let points: Vec<serde_json::Value> = stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(points.len(), 6);
    assert_eq!(points[0]["provenance"], "raw-sat");
    assert!(points[0]["pebbles"].as_u64().unwrap() <= 3);
    // The written strategy re-validates through the CLI itself.
    let check = run(&["validate", &dag, out_path.to_str().unwrap()]);
    assert!(check.status.success());
    let report: serde_json::Value = serde_json::from_slice(&check.stdout).unwrap();
    assert!(report["pebbles"].as_u64().unwrap() <= 3);
    assert!(report["ghosts"].as_u64().unwrap() <= 1);
}

#[test]
fn solve_exhausts_on_starved_budget() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    let out = run(&[
        "solve", &dag, "--pebbles", "2", "--ghosts", "5", "--max-horizon", "12",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exhausted"));
}

#[test]
fn oracle_matches_known_costs() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    let out = run(&["oracle", &dag, "--semantics", "reversible"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["min_pebbles"], 4);
    let out = run(&["oracle", &dag, "--ghosts", "1"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["min_pebbles"], 3);
}

#[test]
fn gen_output_is_parseable() {
    let out = run(&["gen", "line", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 3);
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "line.txt", &text);
    let check = run(&["oracle", &dag, "--semantics", "irreversible"]);
    assert!(check.status.success());
}

#[test]
fn pareto_emits_expected_front() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    let csv_path = dir.path().join("points.csv");
    let out = run(&[
        "pareto",
        &dag,
        "--repeats",
        "2",
        "--optimizer-runs",
        "2",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let points: Vec<serde_json::Value> = stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!points.is_empty());
    // Every reported cost is achievable: no ghost-free point below the
    // true minimum of 4 pebbles, and budgets are respected.
    for p in &points {
        let pebbles = p["pebbles"].as_u64().unwrap();
        let ghosts = p["ghosts"].as_u64().unwrap();
        assert!(pebbles <= 5 && ghosts <= 5);
        if ghosts == 0 {
            assert!(pebbles >= 4, "ghost-free point below minimum: {p}");
        }
    }
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("pebbles,ghosts,time,provenance,seed,wall_time"));
    assert_eq!(csv.lines().count(), points.len() + 1);
}

#[test]
fn pareto_rejects_zero_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let dag = write(dir.path(), "dag.txt", EXAMPLE_DAG);
    let out = run(&["pareto", &dag, "--repeats", "0"]);
    assert!(!out.status.success());
}
