mod common;

use proptest::prelude::*;

use ctxgram::grammar::Symbol;
use ctxgram::normalize::{eliminate_epsilon, eliminate_null_contexts, eliminate_unit_conjuncts, pre_normalize};
use ctxgram::{parse_grammar, pretty_print, validate, Oracle};

fn input() -> impl Strategy<Value = Vec<char>> {
    prop::collection::vec(prop::sample::select(vec!['a', 'b']), 0..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let g = parse_grammar(&pretty_print(&common::random_grammar(seed, 4, 6))).unwrap();
        prop_assert_eq!(parse_grammar(&pretty_print(&g)).unwrap(), g);
    }

    #[test]
    fn printing_preserves_the_language(seed in any::<u64>(), w in input()) {
        let g = common::random_grammar(seed, 4, 6);
        let h = parse_grammar(&pretty_print(&g)).unwrap();
        prop_assert_eq!(Oracle::new(&g).unwrap().accepts(&w).unwrap(), Oracle::new(&h).unwrap().accepts(&w).unwrap());
    }

    #[test]
    fn validation_is_pure(seed in any::<u64>()) {
        let g = common::random_grammar(seed, 4, 6);
        prop_assert_eq!(validate(&g), validate(&g));
    }

    #[test]
    fn every_stage_keeps_a_base(seed in any::<u64>()) {
        let g = common::random_grammar(seed, 4, 6);
        let pre = pre_normalize(&g);
        let eps = eliminate_epsilon(&pre).unwrap();
        let flags = eliminate_null_contexts(&eps);
        let units = eliminate_unit_conjuncts(&flags).unwrap();
        for stage in [&g, &pre, &eps, &flags, &units] {
            prop_assert!(stage.rules().iter().all(|r| r.has_base()));
        }
    }

    #[test]
    fn closure_is_a_fixpoint(seed in any::<u64>(), w in input()) {
        let g = common::random_grammar(seed, 4, 6);
        let o = Oracle::new(&g).unwrap();
        let items = o.derive(&w).unwrap();
        prop_assert_eq!(o.closure_step(&items), 0);
    }

    #[test]
    fn justifications_are_sound(seed in any::<u64>(), w in input()) {
        let g = common::random_grammar(seed, 4, 6);
        let items = Oracle::new(&g).unwrap().derive(&w).unwrap();
        for it in items.derived_items() {
            let proof = items.proof(&g, &it).unwrap();
            prop_assert!(proof.verify(&g, &w).is_ok());
        }
    }

    #[test]
    fn no_empty_items_after_elimination(seed in any::<u64>(), w in input()) {
        let g = common::random_grammar(seed, 4, 6);
        let eps = eliminate_epsilon(&pre_normalize(&g)).unwrap();
        let items = Oracle::new(&eps).unwrap().derive(&w).unwrap();
        for a in eps.nonterminals() {
            for i in 0..=w.len() {
                prop_assert!(!items.contains(Symbol::N(a), i, i));
            }
        }
        if !w.is_empty() {
            prop_assert_eq!(Oracle::new(&g).unwrap().accepts(&w).unwrap(), Oracle::new(&eps).unwrap().accepts(&w).unwrap());
        }
    }
}
