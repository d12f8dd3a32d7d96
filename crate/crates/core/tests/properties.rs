use daelix::random::{random_rule_theory, random_theory, Shape};
use daelix::syntax::parse_theory;
use daelix::{ground_theory, Engine, Limits, Tv};
use proptest::prelude::*;

fn tv() -> impl Strategy<Value = Tv> {
    prop_oneof![Just(Tv::T), Just(Tv::F), Just(Tv::U)]
}

proptest! {
    #[test]
    fn de_morgan_and_precision(a in tv(), b in tv()) {
        prop_assert_eq!(a.and(b).not(), a.not().or(b.not()));
        prop_assert_eq!(a.and(b), b.and(a));
        prop_assert!(Tv::U.le_precision(a));
        if a.le_precision(b) {
            prop_assert!(a.and(Tv::T).le_precision(b.and(Tv::T)));
        }
    }

    #[test]
    fn kripke_kleene_below_well_founded_and_supported(seed in 0u64..100_000) {
        let src = random_theory(seed, Shape::ORACLE);
        let e = Engine::new(ground_theory(&parse_theory(&src).unwrap(), &Limits::default()).unwrap(), Limits::default()).unwrap();
        let kk = e.kripke_kleene().unwrap();
        let wf = e.well_founded().unwrap();
        prop_assert!(kk.le_precision(&wf), "{}", src);
        for q in e.supported_models().unwrap() {
            let exact = daelix::BeliefPair::new(q.clone(), q);
            prop_assert!(kk.le_precision(&exact), "{}", src);
        }
    }

    #[test]
    fn source_round_trip_is_stable(seed in 0u64..100_000) {
        let src = random_rule_theory(seed, Shape::RULES);
        let t = parse_theory(&src).unwrap();
        let again = parse_theory(&t.to_string()).unwrap();
        prop_assert_eq!(t, again);
    }
}
