use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::path::PathBuf;
use std::process::Command;

use fcmult::cli::{parse_bounds_override, run, AlgebraCheckReport, FcAuditReport, Outcome, RunBounds};
use fcmult::format::to_json;

fn scratch(name: &str, body: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn fcmult(args: &[&str]) -> Outcome {
    run(std::iter::once("fcmult").chain(args.iter().copied()))
}

fn fixture_file(name: &str, perturb: bool) -> String {
    let mut args = vec!["fixture", name];
    if perturb {
        args.push("--perturb");
    }
    let out = fcmult(&args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    scratch(&format!("{name}-{perturb}.json"), &out.stdout)
}

const BIMODULE_GRAPH: &str = r#"{
  "format_version": 1,
  "graph": {
    "vertices": ["v0", "v1"],
    "edges": [
      {"id": "e0", "src": "v0", "tgt": "v0"},
      {"id": "e1", "src": "v1", "tgt": "v1"},
      {"id": "e01", "src": "v0", "tgt": "v1"}
    ]
  }
}"#;

#[test]
fn graph_check_statuses() {
    let ok = fcmult(&["graph-check", &scratch("bimodule.json", BIMODULE_GRAPH)]);
    assert_eq!(ok.code, 0, "{ok:?}");
    assert!(ok.stdout.contains("bounds:"));

    let dangling = BIMODULE_GRAPH.replace(
        r#""tgt": "v1"}
    ]"#,
        r#""tgt": "v1"},
      {"id": "stray", "src": "v1", "tgt": "w"}
    ]"#,
    );
    let bad = fcmult(&["graph-check", &scratch("dangling.json", &dangling)]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.contains("stray"), "{}", bad.stdout);

    let broken = fcmult(&["graph-check", &scratch("broken.json", "{\n  \"format_version\": 1,\n  \"graph\": {\n")]);
    assert_eq!(broken.code, 2);
    assert!(broken.stderr.contains("line"), "{}", broken.stderr);

    let missing = fcmult(&["graph-check", "/nonexistent/graph.json"]);
    assert_eq!(missing.code, 2);
}

fn pair_graph_json(vs: &[&str]) -> String {
    let edges: Vec<String> = vs
        .iter()
        .flat_map(|a| vs.iter().map(move |b| format!(r#"{{"id": "({a},{b})", "src": "{a}", "tgt": "{b}"}}"#)))
        .collect();
    let vertices: Vec<String> = vs.iter().map(|v| format!("\"{v}\"")).collect();
    format!(r#"{{"vertices": [{}], "edges": [{}]}}"#, vertices.join(", "), edges.join(", "))
}

/// Endpoint-closedness computed from scratch: no edge outside the sub joins
/// two vertices that a sub path already joins.
fn endpoint_closed_oracle(edges: &[(String, String, String)], sub_edges: &BTreeSet<String>) -> bool {
    let reach = |from: &str, to: &str| {
        let mut seen = BTreeSet::from([from.to_string()]);
        let mut queue = VecDeque::from([from.to_string()]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for (id, s, t) in edges {
                if s == &v && sub_edges.contains(id) && seen.insert(t.clone()) {
                    queue.push_back(t.clone());
                }
            }
        }
        false
    };
    edges.iter().all(|(id, s, t)| sub_edges.contains(id) || !reach(s, t))
}

#[test]
fn graph_check_partition_verdict() {
    let vs = ["a", "b", "c"];
    let parts: Vec<Vec<&str>> = vec![vec!["a", "b"], vec!["c"]];
    let text =
        format!(r#"{{"format_version": 1, "graph": {}, "partition": [["a", "b"], ["c"]]}}"#, pair_graph_json(&vs));
    let out = fcmult(&["graph-check", &scratch("partition.json", &text), "--format", "json"]);
    assert_eq!(out.code, 0, "{out:?}");
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();

    let part_of = |x: &str| parts.iter().position(|p| p.contains(&x)).unwrap();
    let mut edges = Vec::new();
    let mut sub = BTreeSet::new();
    for a in vs {
        for b in vs {
            let id = format!("({a},{b})");
            if part_of(a) <= part_of(b) {
                sub.insert(id.clone());
            }
            edges.push((id, a.to_string(), b.to_string()));
        }
    }
    let expected = endpoint_closed_oracle(&edges, &sub);
    assert_eq!(v["endpoint_closed"], serde_json::Value::Bool(expected));
    assert!(expected, "a partition subgraph is endpoint-closed");
}

#[test]
fn fc_audits() {
    let pl = format!(
        r#"{{"format_version": 1, "graph": {}, "instance": {{"kind": "profile-loops"}}}}"#,
        pair_graph_json(&["a", "b"])
    );
    let out = fcmult(&["fc-audit", &scratch("pl.json", &pl), "--arity", "3", "--path-len", "3"]);
    assert_eq!(out.code, 0, "{}", out.stdout);

    let with_sub = format!(
        r#"{{"format_version": 1, "graph": {}, "instance": {{"kind": "profile-loops"}}, "partition": [["a"], ["b"]]}}"#,
        pair_graph_json(&["a", "b"])
    );
    let out = fcmult(&[
        "fc-audit",
        &scratch("pl-sub.json", &with_sub),
        "--arity",
        "3",
        "--path-len",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let report: FcAuditReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.endpoint_closed, Some(true));
    assert!(report.factor_closed.unwrap().closed);

    // a unit that does not act as a unit
    let corrupted = r#"{
      "format_version": 1,
      "graph": {"vertices": ["v"], "edges": [{"id": "e", "src": "v", "tgt": "v"}]},
      "instance": {
        "kind": "table",
        "cells": [
          {"name": "id", "inputs": ["e"], "output": "e"},
          {"name": "f", "inputs": ["e"], "output": "e"}
        ],
        "units": [{"edge": "e", "cell": "id"}],
        "compose": [
          {"outer": "id", "slot": 1, "inner": "id", "result": "id"},
          {"outer": "id", "slot": 1, "inner": "f", "result": "id"},
          {"outer": "f", "slot": 1, "inner": "id", "result": "f"},
          {"outer": "f", "slot": 1, "inner": "f", "result": "f"}
        ]
      }
    }"#;
    let out = fcmult(&["fc-audit", &scratch("corrupted.json", corrupted)]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    assert!(out.stdout.contains("witness"), "{}", out.stdout);
}

#[test]
fn free_d2_sweeps() {
    let out = fcmult(&["free-d2", "ainf", "--arity", "8"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("arity ≤ 8"));
    assert_eq!(fcmult(&["free-d2", "bimodule", "--arity", "5"]).code, 0);
    assert_eq!(fcmult(&["free-d2", "category", "--vertices", "a,b", "--arity", "4", "--labels", "1"]).code, 0);
    assert_eq!(fcmult(&["free-d2", "rmodule", "--vertices", "a,b,c", "--parts", "a,b|c", "--arity", "4"]).code, 0);
    let faulty = fcmult(&["free-d2", "ainf", "--arity", "4", "--inject-fault"]);
    assert_eq!(faulty.code, 1);
    assert!(faulty.stdout.contains("FAIL"));
    assert_eq!(fcmult(&["free-d2", "octopus"]).code, 2);
}

#[test]
fn free_d2_generalized_file() {
    let text = r#"{
      "format_version": 1,
      "name": "generalized",
      "graph": {"vertices": ["p", "q"], "edges": [
        {"id": "f", "src": "p", "tgt": "q"},
        {"id": "l", "src": "q", "tgt": "q"}
      ]}
    }"#;
    let path = scratch("generalized.json", text);
    let out = fcmult(&["free-d2", &format!("generalized:{path}"), "--arity", "5"]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
}

#[test]
fn algebra_checks() {
    let out = fcmult(&["algebra-check", &fixture_file("dual-numbers", false), "--route", "both"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("routes agree: yes"));

    let out = fcmult(&["algebra-check", &fixture_file("dual-numbers", true), "--format", "json"]);
    assert_eq!(out.code, 1);
    let report: AlgebraCheckReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.routes_agree, Some(true));
    for r in &report.reports {
        assert_eq!(r.lowest_failing_arity, Some(3));
        assert!(!r.failures[0].witness_inputs.is_empty());
    }

    let out = fcmult(&["algebra-check", &fixture_file("ground-field-bimodule", false)]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    for route in ["generic", "direct"] {
        let out = fcmult(&["algebra-check", &fixture_file("two-object-category", false), "--route", route]);
        assert_eq!(out.code, 0, "{}", out.stdout);
    }

    let mismatch = r#"{
      "format_version": 1,
      "preset": {"name": "ainf"},
      "complexes": [{"edge": "e", "basis": [{"id": "x", "degree": 0}], "differential": []}],
      "assignment": [{"inputs": ["e", "e"], "output": "e", "entries": [{"inputs": ["x", "x"], "output": "x", "coeff": "1"}]}]
    }"#;
    assert_eq!(fcmult(&["algebra-check", &scratch("mismatch.json", mismatch)]).code, 2);
}

#[test]
fn json_round_trips_and_output_is_deterministic() {
    let path = fixture_file("upper-triangular", false);
    let args = ["algebra-check", path.as_str(), "--format", "json", "--arity", "4"];
    let first = fcmult(&args);
    let second = fcmult(&args);
    assert_eq!(first, second);
    let report: AlgebraCheckReport = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!(to_json(&report) + "\n", first.stdout);
    assert_eq!(report.bounds.arity, 4);

    let a = fcmult(&["fixture", "dg-upper-triangular", "--perturb", "--seed", "7"]);
    let b = fcmult(&["fixture", "dg-upper-triangular", "--perturb", "--seed", "7"]);
    assert_eq!(a, b);
}

#[test]
fn bounds_override() {
    let b = parse_bounds_override("arity=7, labels=1,path-len=2", RunBounds::default()).unwrap();
    assert_eq!(b, RunBounds { arity: 7, labels: 1, path_len: 2 });
    assert!(parse_bounds_override("depth=3", RunBounds::default()).is_err());
    assert!(parse_bounds_override("arity=x", RunBounds::default()).is_err());
    assert_eq!(fcmult(&["free-d2", "ainf", "--arity", "0"]).code, 2);
}

#[test]
fn binary_reads_bounds_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fcmult"))
        .args(["free-d2", "ainf"])
        .env("FCMULT_BOUNDS", "arity=6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("arity ≤ 6"));
    let out = Command::new(env!("CARGO_BIN_EXE_fcmult"))
        .args(["free-d2", "ainf"])
        .env("FCMULT_BOUNDS", "bogus")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
