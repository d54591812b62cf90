//! Truth evaluation. A state satisfies a formula when every designated world
//! does. Dynamic modalities evaluate against the product of the current model
//! with the action's event model; products are memoized per evaluation call
//! so chained modalities stay linear in the chain length.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::action::{self, Action, EventModel, ProductModel};
use crate::formula::Formula;
use crate::model::{EpistemicModel, State};

/// Per-call cache of product models, keyed by the identities of the base
/// model and the event model.
#[derive(Default)]
pub(crate) struct EvalCtx {
    products: FxHashMap<(usize, usize), Arc<ProductModel>>,
}

impl EvalCtx {
    pub(crate) fn product(
        &self,
        model: &Arc<EpistemicModel>,
        em: &Arc<EventModel>,
    ) -> Option<Arc<ProductModel>> {
        let key = (Arc::as_ptr(model) as usize, Arc::as_ptr(em) as usize);
        self.products.get(&key).cloned()
    }

    pub(crate) fn cache_product(
        &mut self,
        model: &Arc<EpistemicModel>,
        em: &Arc<EventModel>,
        product: Arc<ProductModel>,
    ) {
        let key = (Arc::as_ptr(model) as usize, Arc::as_ptr(em) as usize);
        self.products.insert(key, product);
    }
}

/// State truth: φ holds at every designated world.
pub fn evaluate(state: &State, f: &Formula) -> bool {
    let mut ctx = EvalCtx::default();
    state.designated().iter().all(|&w| eval_at(&mut ctx, state.model(), w, f))
}

pub(crate) fn eval_at(
    ctx: &mut EvalCtx,
    model: &Arc<EpistemicModel>,
    w: u32,
    f: &Formula,
) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(p) => model.valuation(w).contains(*p),
        Formula::Not(g) => !eval_at(ctx, model, w, g),
        Formula::And(a, b) => eval_at(ctx, model, w, a) && eval_at(ctx, model, w, b),
        Formula::Or(a, b) => eval_at(ctx, model, w, a) || eval_at(ctx, model, w, b),
        Formula::Implies(a, b) => !eval_at(ctx, model, w, a) || eval_at(ctx, model, w, b),
        Formula::Knows(i, g) => {
            model.partition(*i).class_of(w).iter().all(|&v| eval_at(ctx, model, v, g))
        }
        Formula::Common(g) => {
            let c = model.component_of(w);
            model.worlds().filter(|&v| model.component_of(v) == c).all(|v| {
                eval_at(ctx, model, v, g)
            })
        }
        Formula::Box(a, g) => box_at(ctx, model, w, a, g),
        Formula::Diamond(a, g) => diamond_at(ctx, model, w, a, g),
        Formula::Applied(a, g) => {
            // ⟪a⟫φ := ⟨a⟩⊤ ∧ [a]φ.
            diamond_at(ctx, model, w, a, &Formula::Top) && box_at(ctx, model, w, a, g)
        }
    }
}

/// [a]φ at w: for every designated event whose precondition holds at w,
/// φ holds at the corresponding product world.
fn box_at(
    ctx: &mut EvalCtx,
    model: &Arc<EpistemicModel>,
    w: u32,
    a: &Arc<Action>,
    g: &Formula,
) -> bool {
    a.designated().iter().all(|&e| {
        if !eval_at(ctx, model, w, a.model().pre(e)) {
            return true;
        }
        let product = action::product_model(model, a.model(), ctx);
        let idx = product.pair_index[&(w, e)];
        let pmodel = Arc::clone(&product.model);
        eval_at(ctx, &pmodel, idx, g)
    })
}

/// ⟨a⟩φ = ¬[a]¬φ: some designated event applies at w and φ holds afterwards.
fn diamond_at(
    ctx: &mut EvalCtx,
    model: &Arc<EpistemicModel>,
    w: u32,
    a: &Arc<Action>,
    g: &Formula,
) -> bool {
    a.designated().iter().any(|&e| {
        if !eval_at(ctx, model, w, a.model().pre(e)) {
            return false;
        }
        let product = action::product_model(model, a.model(), ctx);
        let idx = product.pair_index[&(w, e)];
        let pmodel = Arc::clone(&product.model);
        eval_at(ctx, &pmodel, idx, g)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{is_applicable, product_update};
    use crate::bench::apartment;
    use crate::parser::parse_formula;
    use crate::random::{random_action, random_formula, random_state, rng};
    use crate::sig::{AgentId, Signature};

    #[test]
    fn anne_knows_bob_does_not() {
        let task = apartment(false);
        let s = task.initial();
        let f = parse_formula("K[anne] m & !K[bob] m & K[anne] !K[bob] m", task.sig()).unwrap();
        assert!(evaluate(s, &f));
    }

    #[test]
    fn update_examples() {
        let task = apartment(false);
        let sig = task.sig();
        let bob = sig.agent("bob").unwrap();
        let try_take = &task.action("try-take").unwrap().action;
        let updated = product_update(task.initial(), try_take).unwrap();
        assert!(evaluate(&updated, &parse_formula("C h", sig).unwrap()));
        let from_bob = product_update(&task.initial().perspective_shift(bob), try_take).unwrap();
        assert!(!evaluate(&from_bob, &parse_formula("h", sig).unwrap()));
        assert!(evaluate(task.initial(), &Formula::Top));
    }

    #[test]
    fn bobs_view_cannot_verify_the_key() {
        let task = apartment(false);
        let bob = task.sig().agent("bob").unwrap();
        let m = parse_formula("m", task.sig()).unwrap();
        assert!(evaluate(task.initial(), &m));
        assert!(!evaluate(&task.initial().perspective_shift(bob), &m));
    }

    #[test]
    fn applied_matches_applicability_plus_update() {
        let sig = Signature::new(["a", "b"], ["p", "q"]).unwrap();
        let mut rng = rng(5);
        for round in 0..300 {
            let state = random_state(&mut rng, &sig, 4);
            let action =
                std::sync::Arc::new(random_action(&mut rng, &sig, "act", AgentId(round % 2)));
            let f = random_formula(&mut rng, &sig, 2);
            let lhs = evaluate(&state, &Formula::applied(std::sync::Arc::clone(&action), f.clone()));
            let rhs = is_applicable(&action, &state)
                && evaluate(&product_update(&state, &action).unwrap(), &f);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn diamond_is_dual_of_box() {
        let sig = Signature::new(["a", "b"], ["p", "q"]).unwrap();
        let mut rng = rng(6);
        for round in 0..300 {
            let state = random_state(&mut rng, &sig, 4);
            let action =
                std::sync::Arc::new(random_action(&mut rng, &sig, "act", AgentId(round % 2)));
            let f = random_formula(&mut rng, &sig, 2);
            let diamond = Formula::Diamond(std::sync::Arc::clone(&action), Box::new(f.clone()));
            let box_not = Formula::Box(std::sync::Arc::clone(&action), Box::new(Formula::not(f)));
            // State-level truth quantifies over designated worlds, so check
            // the duality world by world.
            for g in state.globals() {
                assert_eq!(evaluate(&g, &diamond), !evaluate(&g, &box_not));
            }
        }
    }

    #[test]
    fn common_knowledge_is_a_fixpoint() {
        let sig = Signature::new(["a", "b", "c"], ["p", "q"]).unwrap();
        let mut rng = rng(7);
        for _ in 0..200 {
            let state = random_state(&mut rng, &sig, 5);
            let f = random_formula(&mut rng, &sig, 2);
            let cf = Formula::common(f);
            if evaluate(&state, &cf) {
                for i in sig.agents() {
                    assert!(evaluate(&state, &Formula::knows(i, cf.clone())));
                }
            }
        }
    }

    #[test]
    fn s5_validities() {
        let sig = Signature::new(["a", "b"], ["p", "q"]).unwrap();
        let mut rng = rng(8);
        for _ in 0..200 {
            let state = random_state(&mut rng, &sig, 5);
            let f = random_formula(&mut rng, &sig, 2);
            for i in sig.agents() {
                let kf = Formula::knows(i, f.clone());
                if evaluate(&state, &kf) {
                    assert!(evaluate(&state, &f));
                    assert!(evaluate(&state, &Formula::knows(i, kf.clone())));
                }
            }
        }
    }

    #[test]
    fn perspective_shift_soundness() {
        // s^i satisfies phi iff s satisfies K_i phi; on states local
        // for i the two collapse.
        let sig = Signature::new(["a", "b", "c"], ["p", "q", "r"]).unwrap();
        let mut rng = rng(9);
        for _ in 0..300 {
            let state = random_state(&mut rng, &sig, 5);
            let f = random_formula(&mut rng, &sig, 3);
            for i in sig.agents() {
                let shifted = state.perspective_shift(i);
                assert_eq!(
                    evaluate(&shifted, &f),
                    evaluate(&state, &Formula::knows(i, f.clone()))
                );
                if state.is_local_for(i) {
                    assert_eq!(
                        evaluate(&state, &f),
                        evaluate(&state, &Formula::knows(i, f.clone()))
                    );
                }
            }
        }
    }
}
