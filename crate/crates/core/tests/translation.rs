use daelix::ael::{is_permaconsistent, translate_theory};
use daelix::oracle::{all_dpws, convert_dpws};
use daelix::random::{random_theory, Shape};
use daelix::{ground_theory, parse_theory, BeliefPair, Engine, Limits};

/// Supported and stable membership agree under the translation for every universally
/// consistent exact pair over the flat frame.
#[test]
fn exact_pairs_correspond_exhaustively() {
    let l = Limits::default();
    let mut checked = 0;
    for seed in 0..60 {
        let src = random_theory(seed, Shape::ORACLE);
        let g = ground_theory(&parse_theory(&src).unwrap(), &l).unwrap();
        let e = Engine::new(g.clone(), l.clone()).unwrap();
        let tr = translate_theory(&g).unwrap();
        let a = Engine::new(tr.theory.clone(), l.clone()).unwrap();
        let (sup, st) = (e.supported_models().unwrap(), e.stable_models().unwrap());
        let (asup, ast) = (a.supported_models().unwrap(), a.stable_models().unwrap());
        let (flat, all) = all_dpws(&g).unwrap();
        for q in all {
            let q = convert_dpws(&flat, &q, &e.frame).unwrap();
            if !q.is_universally_consistent() {
                continue;
            }
            let image = tr.belief_pair(&e.frame, &a.frame, &BeliefPair::new(q.clone(), q.clone()), &l).unwrap().conservative;
            assert_eq!(sup.contains(&q), asup.contains(&image), "supported, seed {seed}\n{src}");
            assert_eq!(st.contains(&q), ast.contains(&image), "stable, seed {seed}\n{src}");
            checked += 1;
        }
    }
    assert!(checked >= 500, "{checked}");
}

#[test]
fn permaconsistent_theories_keep_well_founded_models() {
    let l = Limits::default();
    let mut seen = 0;
    for seed in 0..100 {
        let src = random_theory(seed, Shape::ORACLE);
        let g = ground_theory(&parse_theory(&src).unwrap(), &l).unwrap();
        if !is_permaconsistent(&g, &l).unwrap() {
            continue;
        }
        let e = Engine::new(g.clone(), l.clone()).unwrap();
        let tr = translate_theory(&g).unwrap();
        let a = Engine::new(tr.theory.clone(), l.clone()).unwrap();
        let wf = e.well_founded().unwrap();
        assert!(wf.is_universally_consistent());
        assert_eq!(tr.belief_pair(&e.frame, &a.frame, &wf, &l).unwrap(), a.well_founded().unwrap(), "seed {seed}\n{src}");
        seen += 1;
    }
    assert!(seen >= 20, "{seen}");
}
