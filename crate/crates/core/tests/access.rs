use daelix::access::{decide_scenario, parse_scenario, scenario_source, scenario_to_theory};
use daelix::fast::is_rule_theory;
use daelix::{ground_theory, Error, Limits, Semantics};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn sgn1_theory_family() {
    let s = parse_scenario(&fixture("sgn1.scn")).unwrap();
    let src = scenario_source(&s).unwrap();
    let t = scenario_to_theory(&s).unwrap();
    assert_eq!(t.agent_names(), ["A", "B", "C", "D", "E", "F"]);
    let sizes: Vec<usize> = t.theories.iter().map(Vec::len).collect();
    // Owner: two axioms plus two grants; B two grants; C one revocation; D one; E one; F none.
    assert_eq!(sizes, [4, 2, 1, 1, 1, 0]);
    assert!(src.contains("revoke(D)"));
    assert!(src.contains("deleg_to(F)"));
}

#[test]
fn sgn3_keeps_an_isolated_principal() {
    let s = parse_scenario(&fixture("sgn3.scn")).unwrap();
    assert_eq!(s.principals, ["A", "B", "C", "D"]);
    assert_eq!(s.grants.iter().filter(|(a, b)| a == b).count(), 1);
}

#[test]
fn all_scenarios_are_rule_theories() {
    for name in ["sgn1.scn", "sgn2.scn", "sgn3.scn"] {
        let s = parse_scenario(&fixture(name)).unwrap();
        let g = ground_theory(&scenario_to_theory(&s).unwrap(), &Limits::default()).unwrap();
        assert!(is_rule_theory(&g), "{name}");
    }
}

#[test]
fn partial_stable_reads_the_well_founded_model() {
    let l = Limits::default();
    for name in ["sgn1.scn", "sgn2.scn", "sgn3.scn"] {
        let pst = decide_scenario(&fixture(name), Semantics::PartialStable, false, &l).unwrap();
        let wf = decide_scenario(&fixture(name), Semantics::WellFounded, false, &l).unwrap();
        assert_eq!(pst.decisions, wf.decisions, "{name}");
    }
}

/// An inconsistent principal issues every revocation, its own included, so its access and
/// that of anyone it could revoke stay undecided.
#[test]
fn inconsistent_principal_revokes_everyone() {
    let src = "principals A, B, C; owner A; resource r; grant A -> B; grant A -> C; statement B \"access(B, r) & ~access(B, r)\";";
    let d = decide_scenario(src, Semantics::WellFounded, false, &Limits::default()).unwrap();
    assert_eq!(d.to_string(), "{A^t,B^u,C^u}");
    assert_eq!(d.granted(), ["A"]);
    let fast = decide_scenario(src, Semantics::WellFounded, true, &Limits::default()).unwrap();
    assert_eq!(fast, d);
}

#[test]
fn json_output_is_stable() {
    let d = decide_scenario(&fixture("sgn3.scn"), Semantics::KripkeKleene, false, &Limits::default()).unwrap();
    let json = d.to_json().to_string();
    assert_eq!(json, r#"{"decisions":{"A":"t","B":"u","C":"u","D":"f"},"granted":["A"],"semantics":"kk"}"#);
}

#[test]
fn fast_path_rejects_other_semantics() {
    let r = decide_scenario(&fixture("sgn1.scn"), Semantics::Stable, true, &Limits::default());
    assert!(matches!(r, Err(Error::Invalid(_))));
}

#[test]
fn parse_errors_carry_positions() {
    match parse_scenario("owner A;\nresource r;\n  frobnicate X;") {
        Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (3, 3)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_scenario("owner A; grant A -> B;"), Err(Error::Parse { .. })));
    assert!(matches!(parse_scenario("owner A; resource r; statement B \"p;"), Err(Error::Parse { .. })));
}
