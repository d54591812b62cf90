//! Property tests over generated formulas and states.

use std::sync::Arc;

use proptest::prelude::*;

use delplan_core::bisim::contract;
use delplan_core::eval::evaluate;
use delplan_core::formula::Formula;
use delplan_core::parser::parse_formula;
use delplan_core::random::{random_state, rng};
use delplan_core::sig::{AgentId, PropId, Signature};

fn sig() -> Arc<Signature> {
    Signature::new(["anne", "bob", "carol"], ["m", "h", "at-1", "for-2"]).unwrap()
}

fn formula_strategy(num_agents: u32, num_props: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bot),
        (0..num_props).prop_map(|p| Formula::Atom(PropId(p))),
    ];
    leaf.prop_recursive(5, 64, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (0..num_agents, inner.clone()).prop_map(|(i, f)| Formula::knows(AgentId(i), f)),
            inner.prop_map(Formula::common),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Printing and reparsing reproduces the exact tree.
    #[test]
    fn print_parse_round_trip(f in formula_strategy(3, 4)) {
        let sig = sig();
        let printed = f.display(&sig).to_string();
        let reparsed = parse_formula(&printed, &sig).unwrap();
        prop_assert_eq!(f, reparsed, "printed as `{}`", printed);
    }

    /// The abbreviations evaluate by their definitions, world by world.
    #[test]
    fn sugar_matches_definitions(
        a in formula_strategy(3, 4),
        b in formula_strategy(3, 4),
        seed in any::<u64>(),
    ) {
        let sig = sig();
        let state = random_state(&mut rng(seed), &sig, 5);
        for g in state.globals() {
            prop_assert_eq!(
                evaluate(&g, &Formula::or(a.clone(), b.clone())),
                evaluate(
                    &g,
                    &Formula::not(Formula::and(
                        Formula::not(a.clone()),
                        Formula::not(b.clone())
                    ))
                )
            );
            prop_assert_eq!(
                evaluate(&g, &Formula::implies(a.clone(), b.clone())),
                evaluate(&g, &Formula::or(Formula::not(a.clone()), b.clone()))
            );
        }
    }

    /// Canonical keys are stable across re-contraction and shared by states
    /// that differ only in bisimulation-redundant structure.
    #[test]
    fn canonical_keys_are_idempotent(seed in any::<u64>()) {
        let sig = sig();
        let state = random_state(&mut rng(seed), &sig, 6);
        let once = contract(&state);
        let twice = contract(once.state());
        prop_assert_eq!(once.key(), twice.key());
        prop_assert_eq!(once.bytes(), twice.bytes());
    }

    /// Arbitrary input never panics the formula parser.
    #[test]
    fn parser_total_on_garbage(text in "\\PC{0,60}") {
        let sig = sig();
        let _ = parse_formula(&text, &sig);
    }

    /// Arbitrary input never panics the task-file parser.
    #[test]
    fn task_parser_total_on_garbage(text in "[ -~\\n]{0,200}") {
        let _ = delplan_core::taskfile::parse_task(&text);
    }
}
