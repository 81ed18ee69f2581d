use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ta_urgency::automata::isomorphic_modulo_renaming;
use ta_urgency::cli::document::{parse_tts_document, write_ta};
use ta_urgency::cli::parse_ta;
use ta_urgency::fixtures;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ta-urgency")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn put(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn transform_inv_reproduces_example3() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "ex1.json", fixtures::EXAMPLE1);
    let out = dir.path().join("inv.json");
    let o = bin(&["transform", "--kind", "inv", "--in", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("copy l0__u <- l0"));
    assert!(stdout(&o).contains("pruned-edges: 2"));
    let ta = parse_ta(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(isomorphic_modulo_renaming(&ta, &fixtures::example3(), &fixtures::example3_renaming()));
}

#[test]
fn transform_keeps_false_edges_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "ex1.json", fixtures::EXAMPLE1);
    let out = dir.path().join("inv.json");
    let o = bin(&["transform", "--kind", "inv", "--in", &input, "--out", out.to_str().unwrap(), "--no-prune-false"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pruned-edges: 0"));
    assert_eq!(parse_ta(&fs::read_to_string(&out).unwrap()).unwrap().edges.len(), 4);
}

#[test]
fn inv_rejects_urgent_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "ex3.json", fixtures::EXAMPLE3);
    let out = dir.path().join("x.json");
    let o = bin(&["transform", "--kind", "inv", "--in", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("l0u"));
    let o = bin(&["check", "--theorem", "5.5", "--in", &input]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "ex1.json", fixtures::EXAMPLE1);
    for thm in ["5.5", "5.6", "pur"] {
        let o = bin(&["check", "--theorem", thm, "--in", &input, "--cross-check"]);
        assert_eq!(o.status.code(), Some(0), "{thm}: {}", stdout(&o));
        assert!(stdout(&o).contains("verdict: isomorphic"));
    }
    let bad = put(dir.path(), "bad.json", "{ not json");
    assert_eq!(bin(&["check", "--theorem", "pur", "--in", &bad]).status.code(), Some(2));
    assert_eq!(bin(&["check", "--theorem", "9.9", "--in", &input]).status.code(), Some(2));
}

#[test]
fn explore_writes_tts_document() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "ex1.json", fixtures::EXAMPLE1);
    let out = dir.path().join("tts.json");
    let o = bin(&["explore", "--semantics", "weak", "--in", &input, "--cap", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("states: 6"));
    let doc = parse_tts_document(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.states.len(), 6);
    assert!(!doc.truncated);

    let dot = dir.path().join("tts.dot");
    let o = bin(&["export-dot", "--in", out.to_str().unwrap(), "--out", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph tts"));
}

#[test]
fn explore_rejects_cap_below_constants() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "ex1.json", fixtures::EXAMPLE1);
    let out = dir.path().join("tts.json");
    let o = bin(&["explore", "--semantics", "baseline", "--in", &input, "--cap", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = bin(&["gen", "--seed", "17", "--locations", "5", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let ta = parse_ta(&text).unwrap();
    assert_eq!(ta.locations.len(), 5);
    assert_eq!(write_ta(&ta), text);
    assert_eq!(bin(&["gen", "--seed", "1", "--locations", "9", "--out", a.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn export_dot_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "ex3.json", fixtures::EXAMPLE3);
    let out = dir.path().join("ex3.dot");
    let o = bin(&["export-dot", "--in", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dot = fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("digraph automaton"));
    assert_eq!(dot.matches("(U)").count(), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(bin(&[]).status.code(), Some(2));
    assert_eq!(bin(&["transform", "--kind", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}
