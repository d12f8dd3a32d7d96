use daelix::ground::ground_with;
use daelix::query::{decide, query_minimize, says_translate, show_set, InProcessBus, MessageBus};
use daelix::{parse_formula, parse_theory, Ground, GroundTheory, Limits, Tv};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn setup(src: &str, query: &str) -> (GroundTheory, Ground) {
    let t = parse_theory(src).unwrap();
    let q = parse_formula(query, &t).unwrap();
    let (g, mut extra) = ground_with(&t, &[q], &Limits::default()).unwrap();
    (g, extra.remove(0))
}

#[test]
fn running_example_translation_markers() {
    let (g, _) = setup(&fixture("running.dael"), "z");
    let tr = says_translate(&g, 0);
    let shown: Vec<String> = tr.sentences.iter().map(|s| tr.show(s, &g)).collect();
    assert!(shown[1].contains("p-[B says z]"), "{shown:?}");
    assert!(shown[3].contains("~p-[B says r]") && shown[3].contains("p+[B says r]"), "{shown:?}");
    assert!(!shown[3].contains("~p+[B says r]"));
}

#[test]
fn running_example_sets_are_deterministic() {
    let (g, z) = setup(&fixture("running.dael"), "z");
    let l = Limits::default();
    let a = query_minimize(&g, 0, &z, &l).unwrap();
    let b = query_minimize(&g, 0, &z, &l).unwrap();
    assert_eq!(a, b);
    let shown: Vec<String> = a.iter().map(|s| show_set(s, &g)).collect();
    assert_eq!(shown.len(), 3);
}

#[test]
fn running_example_trace_and_dot() {
    let (g, z) = setup(&fixture("running.dael"), "z");
    let d = decide(&g, 0, &z, &Limits::default()).unwrap();
    assert_eq!(d.answer, Tv::T);
    assert_eq!(d.graph.root().label, Some(Tv::T));
    let dot = d.graph.to_dot(&g);
    assert!(dot.starts_with("digraph query {"));
    assert!(dot.contains("<A:z>, t"));
    assert!(dot.contains("(loop)"));
    // Every answered subquery appears once in the trace.
    let asked = d.graph.queries.iter().filter(|q| !q.loop_detected).count() - 1;
    assert_eq!(d.trace.len(), asked);
}

#[test]
fn guard_example_asks_only_from_a() {
    let (g, p) = setup(&fixture("guard.dael"), "p");
    let l = Limits::default();
    let from_b = decide(&g, 1, &p, &l).unwrap();
    assert_eq!(from_b.answer, Tv::F);
    assert_eq!(from_b.remote_events(), 0);
    let from_a = decide(&g, 0, &p, &l).unwrap();
    assert_eq!(from_a.answer, Tv::T);
    assert_eq!(from_a.remote_events(), 1);
    assert_eq!(g.display(&from_a.trace[0].formula).to_string(), "s");
}

#[test]
fn bus_is_reusable_and_answers_repeat() {
    let (g, z) = setup(&fixture("running.dael"), "z");
    let l = Limits::default();
    let mut bus = InProcessBus::new(&g, &l);
    let first = bus.decide(0, &z).unwrap();
    let size = bus.graph.vertex_count();
    assert_eq!(bus.decide(0, &z).unwrap(), first);
    assert_eq!(bus.graph.vertex_count(), size);
    // Subqueries only exist inside a query.
    let path = [daelix::query::Hop { agent: 1, formula: z.clone(), edge: None }];
    assert!(bus.ask(1, &z, &path).is_err());
}

#[test]
fn query_cap_is_reported() {
    let (g, z) = setup(&fixture("running.dael"), "z");
    let l = Limits { query_vertices: 3, ..Limits::default() };
    assert!(matches!(decide(&g, 0, &z, &l), Err(daelix::Error::Cap { .. })));
}
