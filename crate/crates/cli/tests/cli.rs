// SPDX-License-Identifier: MIT
//! End-to-end runs of the `ancestral` binary on the bundled sample inputs.

use std::path::PathBuf;
use std::process::{Command, Output};

use ancestral::graph::parse_graph;
use ancestral::learn::equivalent;
use serde_json::Value;

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ancestral"))
        .args(args)
        .env_remove("CS_MAX_NODES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = run(&all);
    serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)))
}

fn flag(v: &Value, name: &str) -> Option<bool> {
    v["flags"].as_array()?.iter().find(|f| f["name"] == name)?["value"].as_bool()
}

/// `(name, value)` for every flag line of a human report.
fn human_flags(text: &str) -> Vec<(String, bool)> {
    text.lines()
        .filter(|l| l.starts_with("  ") && !l.starts_with("   "))
        .filter_map(|l| {
            let mut parts = l.split_whitespace();
            let name = parts.next()?.to_string();
            match parts.next()? {
                "yes" => Some((name, true)),
                "no" => Some((name, false)),
                _ => None,
            }
        })
        .collect()
}

#[test]
fn every_bundled_example_matches_its_manifest() {
    let o = run(&["paper", "all"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).matches("expectations met").count(), 9);
}

#[test]
fn diamond_example_reports_uniqueness_split() {
    let v = json(&["paper", "fig3"]);
    assert_eq!(flag(&v, "uniqueness"), Some(false));
    assert_eq!(flag(&v, "dag_uniqueness"), Some(true));
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
    assert_eq!(v["provenance"]["fixtures"][0], "fig3");
    // Every false flag carries a witness.
    for f in v["flags"].as_array().unwrap() {
        if f["value"] == false {
            assert!(f["witness"].is_string(), "{f}");
        }
    }
}

#[test]
fn diamond_graphs_are_not_equivalent() {
    let (g1, g2) = (data("diamond_g1.graph"), data("diamond_g2.graph"));
    let o = run(&["equiv", &g1, &g2, "--method", "mag"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("not equivalent"), "{out}");
    assert!(out.contains("<1,2,4>") || out.contains("<4,2,1>"), "{out}");
    assert_eq!(run(&["equiv", &g1, &g2, "--method", "mag", "--strict"]).status.code(), Some(1));
    assert_eq!(run(&["equiv", &g1, &g1, "--method", "brute", "--strict"]).status.code(), Some(0));
    // The DAG criterion does not apply to a graph with an arc.
    assert_eq!(run(&["equiv", &g1, &g2, "--method", "dag"]).status.code(), Some(2));
}

#[test]
fn msep_on_the_chain() {
    let g = data("chain4.graph");
    let o = run(&["msep", &g, "--a", "k", "--b", "j", "--c", "l"]);
    assert!(stdout(&o).starts_with("separated\n"), "{}", stdout(&o));
    let o = run(&["msep", &g, "--a", "i", "--b", "j", "--c", "k", "--strict"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("connected: connecting path <i,k,l,j>"), "{}", stdout(&o));
    let v = json(&["msep", &g, "--a", "i", "--b", "j"]);
    assert_eq!(flag(&v, "separated"), Some(true));
}

#[test]
fn dag_learner_returns_one_class() {
    let m = data("diamond.model");
    let v = json(&["learn", &m, "--dags-only"]);
    let graphs: Vec<_> = v["graphs"].as_array().unwrap().iter().map(|t| parse_graph(t.as_str().unwrap()).unwrap()).collect();
    assert_eq!(graphs.len(), 3);
    let g1 = parse_graph(&std::fs::read_to_string(data("diamond_g1.graph")).unwrap()).unwrap();
    assert!(graphs.iter().all(|g| g.is_dag() && equivalent(g, &g1).unwrap()));
    assert_eq!(flag(&v, "outputs_equivalent"), Some(true));
    // The unrestricted learner also admits arcs and splits into two classes.
    assert_eq!(run(&["learn", &m, "--strict"]).status.code(), Some(1));
}

#[test]
fn worker_count_does_not_change_output() {
    let m = data("diamond.model");
    let one = run(&["learn", &m, "--jobs", "1"]);
    let many = run(&["learn", &m, "--jobs", "4"]);
    assert_eq!(stdout(&one), stdout(&many));
}

#[test]
fn json_and_text_agree() {
    let (m, g1, g2) = (data("diamond.model"), data("diamond_g1.graph"), data("diamond_g2.graph"));
    let cases: Vec<Vec<&str>> = vec![
        vec!["graph-check", &g2],
        vec!["model", &m, "--graph", &g1],
        vec!["audit", &m, "--graph", &g1],
        vec!["equiv", &g1, &g2],
        vec!["scm", "xor3"],
        vec!["paper", "fig4"],
    ];
    for args in cases {
        let text = human_flags(&stdout(&run(&args)));
        let v = json(&args);
        let from_json: Vec<(String, bool)> = v["flags"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| (f["name"].as_str().unwrap().to_string(), f["value"].as_bool().unwrap()))
            .collect();
        assert!(!text.is_empty());
        assert_eq!(text, from_json, "{args:?}");
    }
}

#[test]
fn graph_check_reports_cycles() {
    let o = run(&["graph-check", &data("cyclic.graph"), "--strict"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("directed cycle"), "{}", stdout(&o));
    let o = run(&["graph-check", &data("chain4.graph")]);
    assert!(stdout(&o).contains("minimal collider paths: <i,k,l>"), "{}", stdout(&o));
}

#[test]
fn scm_audit_of_a_builtin() {
    let v = json(&["scm", "mod2@1/3"]);
    assert_eq!(flag(&v, "markovian"), Some(true));
    assert_eq!(flag(&v, "converse_pairwise"), Some(true));
    assert_eq!(v["verdict"], true);
    let v = json(&["scm", "mod2@1/2"]);
    assert_eq!(flag(&v, "converse_pairwise"), Some(false));
}

#[test]
fn scm_audit_of_a_file() {
    // Parity with a fair child noise and a skewed parent: adjacent yet independent.
    let v = json(&["scm", &data("parity.scm.json")]);
    assert_eq!(flag(&v, "markovian"), Some(true));
    assert_eq!(flag(&v, "converse_pairwise"), Some(false));
    assert_eq!(flag(&v, "noise_uniform"), Some(false));
    assert!(v.get("failure").is_none());
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["msep", &data("chain4.graph")]).status.code(), Some(2));
    assert_eq!(run(&["paper", "fig9"]).status.code(), Some(2));
    assert_eq!(run(&["scm", "no-such-model"]).status.code(), Some(2));

    let o = run(&["graph-check", "/nonexistent/x.graph"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/x.graph"));

    let dir = std::env::temp_dir().join(format!("ancestral-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.graph");
    std::fs::write(&bad, "nodes: a b\na -> c\n").unwrap();
    let o = run(&["graph-check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn node_bound_from_flag_and_environment() {
    let g = data("chain4.graph");
    assert_eq!(run(&["graph-check", &g, "--max-nodes", "3"]).status.code(), Some(2));
    assert_eq!(run(&["graph-check", &g, "--max-nodes", "4"]).status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_ancestral"))
        .args(["graph-check", &g])
        .env("CS_MAX_NODES", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bound of 3"));
    assert_eq!(run(&["graph-check", &g, "--max-nodes", "0"]).status.code(), Some(2));
}
