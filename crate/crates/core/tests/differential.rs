use daelix::fast::fast_well_founded;
use daelix::oracle::cross_check;
use daelix::random::{random_rule_theory, random_theory, Shape};
use daelix::{ground_theory, parse_theory, Engine, GroundTheory, Limits};

fn ground(src: &str) -> GroundTheory {
    ground_theory(&parse_theory(src).unwrap(), &Limits::default()).unwrap()
}

#[test]
fn engine_matches_oracle_on_random_theories() {
    for seed in 0..300 {
        let src = random_theory(seed, Shape::ORACLE);
        let mismatches = cross_check(&ground(&src), &Limits::default()).unwrap();
        assert!(mismatches.is_empty(), "seed {seed}: {mismatches:?}\n{src}");
    }
}

#[test]
fn engine_matches_oracle_with_three_agents() {
    let shape = Shape { agents: 3, atoms: 1, sentences: 2, depth: 3 };
    for seed in 0..300 {
        let src = random_theory(seed, shape);
        let mismatches = cross_check(&ground(&src), &Limits::default()).unwrap();
        assert!(mismatches.is_empty(), "seed {seed}: {mismatches:?}\n{src}");
    }
}

#[test]
fn fast_path_matches_engine_on_random_rule_theories() {
    for seed in 0..300 {
        let src = random_rule_theory(seed, Shape::RULES);
        let g = ground(&src);
        let (fast, _) = fast_well_founded(&g).unwrap();
        let engine = Engine::new(g, Limits::default()).unwrap();
        let wf = engine.well_founded().unwrap();
        assert_eq!(fast.to_belief_pair(&engine.frame).unwrap(), wf, "seed {seed}\n{src}");
    }
}
