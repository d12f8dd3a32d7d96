use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn daelix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daelix")).args(args).env_remove("DAELIX_WORLD_CAP").output().unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let out = daelix(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn candy_supported_models() {
    let candy = fixture("candy.dael");
    let v = run_json(&["solve", candy.to_str().unwrap(), "--semantics", "sup"]);
    let models = v["models"].as_array().unwrap();
    assert_eq!(models.len(), 2);
    let known: Vec<&Value> = models.iter().map(|m| &m["conservative"]["M"]["literals"]).collect();
    assert!(known.contains(&&serde_json::json!(["c"])));
    assert!(known.contains(&&serde_json::json!([])));
    assert!(models.iter().all(|m| m["exact"] == true));
}

#[test]
fn empty_theory_well_founded_knows_nothing() {
    let empty = fixture("empty.dael");
    let v = run_json(&["solve", empty.to_str().unwrap(), "--semantics", "wf"]);
    let models = v["models"].as_array().unwrap();
    assert_eq!(models.len(), 1);
    assert_eq!(models[0]["exact"], true);
    for side in ["conservative", "liberal"] {
        for (_, set) in models[0][side].as_object().unwrap() {
            assert_eq!(set["literals"], serde_json::json!([]));
        }
    }
}

#[test]
fn fast_and_generic_well_founded_agree() {
    let rules = fixture("rules.dael");
    let p = rules.to_str().unwrap();
    let generic = run_json(&["solve", p, "--semantics", "wf"]);
    let fast = run_json(&["solve", p, "--semantics", "wf", "--fast"]);
    assert_eq!(generic, fast);
}

#[test]
fn running_query_with_trace_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("graph.dot");
    let running = fixture("running.dael");
    let v = run_json(&["query", running.to_str().unwrap(), "--agent", "A", "--formula", "z", "--trace", "--dot", dot.to_str().unwrap()]);
    assert_eq!(v["answer"], "t");
    assert!(!v["trace"].as_array().unwrap().is_empty());
    let graph = std::fs::read_to_string(&dot).unwrap();
    assert!(graph.starts_with("digraph"));
}

#[test]
fn check_reports_offender() {
    let liar = fixture("liar.dael");
    let v = run_json(&["check", liar.to_str().unwrap()]);
    assert_eq!(v["rule_theory"], false);
    assert!(v["offender"].as_str().unwrap().starts_with("B: "));
    let rules = fixture("rules.dael");
    let v = run_json(&["check", rules.to_str().unwrap()]);
    assert_eq!(v["rule_theory"], true);
    assert_eq!(v["offender"], Value::Null);
}

#[test]
fn scenario_decisions() {
    let sgn = fixture("sgn1.scn");
    let v = run_json(&["scenario", sgn.to_str().unwrap()]);
    assert_eq!(v["semantics"], "wf");
    assert!(v["decisions"].is_object());
    let fast = run_json(&["scenario", sgn.to_str().unwrap(), "--fast"]);
    assert_eq!(v, fast);
}

#[test]
fn translate_prints_single_agent_theory() {
    let vote = fixture("vote.dael");
    let out = daelix(&["translate", vote.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theory {"));
}

#[test]
fn oracle_agrees_on_fixture() {
    let candy = fixture("candy.dael");
    let v = run_json(&["oracle", candy.to_str().unwrap()]);
    assert_eq!(v["agree"], true);
}

#[test]
fn exit_codes() {
    let candy = fixture("candy.dael");
    let c = candy.to_str().unwrap();
    assert_eq!(code(&daelix(&["--help"])), 0);
    assert_eq!(code(&daelix(&["--version"])), 0);
    assert_eq!(code(&daelix(&["solve", c, "--semantics", "nope"])), 1);
    assert_eq!(code(&daelix(&["solve", "/nonexistent/x.dael", "--semantics", "wf"])), 1);
    assert_eq!(code(&daelix(&["solve", c, "--semantics", "st", "--fast"])), 1);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dael");
    std::fs::write(&bad, "agents A.\ntheory A {\n  p &&.\n}\n").unwrap();
    let out = daelix(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("3:"));

    let liar = fixture("liar.dael");
    assert_eq!(code(&daelix(&["solve", liar.to_str().unwrap(), "--semantics", "wf", "--fast"])), 2);

    let capped = Command::new(env!("CARGO_BIN_EXE_daelix"))
        .args(["solve", c, "--semantics", "wf"])
        .env("DAELIX_WORLD_CAP", "0")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 3);
    let bad_env = Command::new(env!("CARGO_BIN_EXE_daelix"))
        .args(["solve", c, "--semantics", "wf"])
        .env("DAELIX_WORLD_CAP", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad_env), 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let vote = fixture("vote.dael");
    let running = fixture("running.dael");
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", vote.to_str().unwrap(), "--semantics", "st"],
        vec!["solve", vote.to_str().unwrap(), "--semantics", "pst"],
        vec!["query", running.to_str().unwrap(), "--agent", "A", "--formula", "z", "--trace"],
        vec!["translate", vote.to_str().unwrap()],
    ];
    for args in cases {
        let a = daelix(&args);
        let b = daelix(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
