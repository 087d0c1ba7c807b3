use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn dms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dms")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_fragments() {
    let out = dms(&["validate", path(&fixture("triangle.dms"))]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("a_add [pf-NCG]") && text.contains("a_end [NCG]"), "{text}");
}

#[test]
fn parse_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dms");
    std::fs::write(&bad, "pred F/2\ninit F(A,\n").unwrap();
    let out = dms(&["validate", path(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.dms:2:10"));
    std::fs::write(&bad, "").unwrap();
    assert_eq!(code(&dms(&["validate", path(&bad)])), 1);
    assert_eq!(code(&dms(&["explore"])), 2, "clap reports usage errors itself");
    assert_eq!(code(&dms(&["explore", path(&fixture("ssn.dms")), "--domain", "lattice"])), 2);
    assert_eq!(code(&dms(&["validate", "/nonexistent/x.dms"])), 1);
}

#[test]
fn explore_depth_zero_is_one_state() {
    let dir = tempfile::tempdir().unwrap();
    let (dot, json) = (dir.path().join("lts.dot"), dir.path().join("lts.json"));
    let out = dms(&["explore", path(&fixture("ssn.dms")), "--depth", "0", "--dot", path(&dot), "--json", path(&json)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("1 states, 0 transitions"));
    let dot = std::fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph lts {") && dot.contains("s0 [label=\"{F(A,B), F(A,C), F(B,A), P(A), P(B), P(C)}\""));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(json["states"].as_array().unwrap().len(), 1);
    assert_eq!(json["states"][0]["Concrete"][0], serde_json::json!({"pred": "F", "args": [{"c": "A"}, {"c": "B"}]}));
}

#[test]
fn abstract_exploration_exports_nulls() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("lts.json");
    let out = dms(&["explore", path(&fixture("ssn.dms")), "--domain", "null-join", "--depth", "1"]);
    assert_eq!(code(&out), 1, "a_rev is not a CNA action");
    // From the empty database, a_add leads to {P(_n0)}.
    let spec = dir.path().join("add.dms");
    std::fs::write(&spec, "pred P/1\naction a_add := guard true add P(x)\n").unwrap();
    let out = dms(&["explore", path(&spec), "--domain", "null-join", "--depth", "2", "--json", path(&json)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("2 states, 2 transitions"), "{}", stdout(&out));
    let lts: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(lts["states"][1]["Abstract"]["upper"][0], serde_json::json!({"pred": "P", "args": [{"n": 0}]}));
}

#[test]
fn reach_exit_codes() {
    let tri = fixture("triangle.dms");
    let out = dms(&["reach", path(&tri), "--target", "a_end", "--domain", "null-pair", "--depth", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("reached a_end after 3 steps"));
    let out = dms(&["reach", path(&tri), "--domain", "null-pair", "--depth", "2"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&dms(&["reach", path(&tri), "--target", "a_none"])), 1);
    assert_eq!(code(&dms(&["reach", path(&tri), "--domain", "inter"])), 1, "NCG guards are not licensed by inter");
}

#[test]
fn abstract_prints_the_abstraction() {
    let out = dms(&["abstract", path(&fixture("ssn.dms")), "--domain", "null-meet", "--set", path(&fixture("de_pair.set"))]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "{F(A,_n0), P(A), P(_n0)}");
    let out = dms(&["abstract", path(&fixture("ssn.dms")), "--domain", "pair", "--set", path(&fixture("de_pair.set"))]);
    assert_eq!(stdout(&out).trim(), "({P(A)}, {F(A,B), F(A,C), P(A), P(B), P(C)})");
}

#[test]
fn galois_reports_are_reproducible() {
    let run = |seed: &str| dms(&["check-galois", "--domain", "pair", "--samples", "40", "--seed", seed, "--json"]);
    let (a, b) = (run("5"), run("5"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["verdict"], "Holds");
}

#[test]
fn bisimulation_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sym.dms");
    std::fs::write(&spec, "pred P/1, F/2\nconst A B C\naction sym := guard F(x,y) & F(y,x)\n").unwrap();
    let set = dir.path().join("c.set");
    std::fs::write(&set, "P(A), P(B), F(A,B), F(B,A)\nP(A), P(B), P(C)\n").unwrap();
    let out = dms(&["check-bisim", path(&spec), "--domain", "inter", "--set", path(&set)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(code(&dms(&["check-bisim", path(&spec), "--domain", "union", "--set", path(&set)])), 1);
    let out = dms(&["check-bisim", path(&spec), "--domain", "union", "--set", path(&set), "--override"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("counterexample: AbstractOnly at <sym"), "{}", stdout(&out));
}
