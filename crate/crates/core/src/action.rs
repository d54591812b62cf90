//! Event models and epistemic actions: events carry precondition formulas and
//! literal-conjunction postconditions, with per-agent indistinguishability
//! over events. The product update composes a state with an action.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::eval::{self, EvalCtx};
use crate::formula::Formula;
use crate::model::{EpistemicModel, State};
use crate::partition::Partition;
use crate::sig::{AgentId, PropId, PropSet, Signature};

/// A conjunction of literals; the empty conjunction is ⊤ (no factual change).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Postcondition {
    literals: Box<[(PropId, bool)]>,
}

impl Postcondition {
    pub fn top() -> Self {
        Postcondition { literals: Box::new([]) }
    }

    pub fn new(sig: &Signature, mut literals: Vec<(PropId, bool)>) -> Result<Self> {
        literals.sort_unstable();
        literals.dedup();
        for pair in literals.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::ConflictingPostcondition {
                    prop: sig.prop_name(pair[0].0).to_owned(),
                });
            }
        }
        Ok(Postcondition { literals: literals.into_boxed_slice() })
    }

    pub fn literals(&self) -> &[(PropId, bool)] {
        &self.literals
    }

    pub fn is_top(&self) -> bool {
        self.literals.is_empty()
    }

    /// Does this postcondition entail the literal `p` / `!p`?
    pub fn entails(&self, p: PropId, positive: bool) -> bool {
        self.literals.binary_search(&(p, positive)).is_ok()
    }

    fn apply(&self, val: &PropSet) -> PropSet {
        let mut out = val.clone();
        for &(p, positive) in self.literals.iter() {
            if positive {
                out.insert(p);
            } else {
                out.remove(p);
            }
        }
        out
    }
}

/// A finite event model: preconditions, postconditions and one
/// indistinguishability partition per agent over the events.
#[derive(Debug)]
pub struct EventModel {
    sig: Arc<Signature>,
    pres: Box<[Formula]>,
    posts: Box<[Postcondition]>,
    partitions: Box<[Partition]>,
    event_names: Option<Box<[String]>>,
}

impl EventModel {
    pub fn new(
        sig: Arc<Signature>,
        pres: Vec<Formula>,
        posts: Vec<Postcondition>,
        partitions: Vec<Partition>,
        event_names: Option<Vec<String>>,
    ) -> Result<Arc<Self>> {
        let n = pres.len();
        if n == 0 {
            return Err(Error::Empty("event set"));
        }
        if posts.len() != n {
            return Err(Error::InvalidParams("one postcondition per event required".into()));
        }
        if partitions.len() != sig.num_agents() {
            return Err(Error::InvalidPartition(
                "one indistinguishability partition per agent is required".into(),
            ));
        }
        for p in &partitions {
            if p.len() != n {
                return Err(Error::InvalidPartition(format!(
                    "partition covers {} events, model has {n}",
                    p.len()
                )));
            }
        }
        if let Some(names) = &event_names {
            if names.len() != n {
                return Err(Error::InvalidParams("one name per event required".into()));
            }
        }
        Ok(Arc::new(EventModel {
            sig,
            pres: pres.into_boxed_slice(),
            posts: posts.into_boxed_slice(),
            partitions: partitions.into_boxed_slice(),
            event_names: event_names.map(Vec::into_boxed_slice),
        }))
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn num_events(&self) -> usize {
        self.pres.len()
    }

    pub fn events(&self) -> impl Iterator<Item = u32> {
        0..self.num_events() as u32
    }

    pub fn pre(&self, e: u32) -> &Formula {
        &self.pres[e as usize]
    }

    pub fn post(&self, e: u32) -> &Postcondition {
        &self.posts[e as usize]
    }

    pub fn partition(&self, i: AgentId) -> &Partition {
        &self.partitions[i.index()]
    }

    pub fn event_name(&self, e: u32) -> String {
        match &self.event_names {
            Some(names) => names[e as usize].clone(),
            None => format!("e{e}"),
        }
    }
}

/// An event model with designated events and a name for reference from plans,
/// policies and dynamic modalities.
#[derive(Debug, Clone)]
pub struct Action {
    name: String,
    model: Arc<EventModel>,
    designated: Arc<[u32]>,
}

impl PartialEq for Action {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && Arc::ptr_eq(&self.model, &other.model)
            && self.designated == other.designated
    }
}

impl Action {
    pub fn new(name: impl Into<String>, model: Arc<EventModel>, mut designated: Vec<u32>) -> Result<Self> {
        designated.sort_unstable();
        designated.dedup();
        if designated.is_empty() {
            return Err(Error::Empty("designated event set"));
        }
        if designated.last().copied().unwrap() as usize >= model.num_events() {
            return Err(Error::InvalidParams("designated event out of range".into()));
        }
        Ok(Action { name: name.into(), model, designated: designated.into() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &Arc<EventModel> {
        &self.model
    }

    pub fn sig(&self) -> &Arc<Signature> {
        self.model.sig()
    }

    pub fn designated(&self) -> &[u32] {
        &self.designated
    }

    /// Local for `i`: the designated events are closed under `i`'s relation.
    pub fn is_local_for(&self, i: AgentId) -> bool {
        self.model.partition(i).is_closed(&self.designated)
    }
}

/// An action is applicable in a state when every designated world satisfies
/// the precondition of at least one designated event.
pub fn is_applicable(action: &Action, state: &State) -> bool {
    let mut ctx = EvalCtx::default();
    is_applicable_ctx(action, state, &mut ctx)
}

pub(crate) fn is_applicable_ctx(action: &Action, state: &State, ctx: &mut EvalCtx) -> bool {
    let em = action.model();
    state.designated().iter().all(|&w| {
        action
            .designated()
            .iter()
            .any(|&e| eval::eval_at(ctx, state.model(), w, em.pre(e)))
    })
}

/// The full product of a model with an event model: worlds are the surviving
/// (world, event) pairs, independent of any designated sets.
pub(crate) struct ProductModel {
    pub model: Arc<EpistemicModel>,
    /// (world, event) -> index in the product model.
    pub pair_index: FxHashMap<(u32, u32), u32>,
}

pub(crate) fn product_model(
    model: &Arc<EpistemicModel>,
    em: &Arc<EventModel>,
    ctx: &mut EvalCtx,
) -> Arc<ProductModel> {
    debug_assert_eq!(
        model.sig().as_ref(),
        em.sig().as_ref(),
        "state and action share one signature"
    );
    if let Some(cached) = ctx.product(model, em) {
        return cached;
    }
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut pair_index = FxHashMap::default();
    for w in model.worlds() {
        for e in em.events() {
            if eval::eval_at(ctx, model, w, em.pre(e)) {
                pair_index.insert((w, e), pairs.len() as u32);
                pairs.push((w, e));
            }
        }
    }
    let valuations: Vec<PropSet> =
        pairs.iter().map(|&(w, e)| em.post(e).apply(model.valuation(w))).collect();
    let sig = Arc::clone(model.sig());
    let partitions: Vec<Partition> = sig
        .agents()
        .map(|i| {
            let wp = model.partition(i);
            let ep = em.partition(i);
            // Pairs are indistinguishable iff both components are.
            let mut groups: FxHashMap<(u32, u32), Vec<u32>> = FxHashMap::default();
            for (idx, &(w, e)) in pairs.iter().enumerate() {
                groups.entry((wp.block_of(w), ep.block_of(e))).or_default().push(idx as u32);
            }
            let mut blocks: Vec<Vec<u32>> = groups.into_values().collect();
            blocks.sort_unstable();
            Partition::from_blocks(pairs.len(), &blocks)
                .expect("component-wise pairing yields a partition")
        })
        .collect();
    let product = Arc::new(ProductModel {
        model: EpistemicModel::with_provenance(sig, valuations, partitions, pairs),
        pair_index,
    });
    ctx.cache_product(model, em, Arc::clone(&product));
    product
}

/// Product update s ⊗ a. All surviving (designated world, designated event)
/// pairs become designated; errors only when none survives, so callers may
/// update states where applicability holds only for part of the designated
/// set (needed for perspective-sensitive successors).
pub fn product_update(state: &State, action: &Action) -> Result<State> {
    let mut ctx = EvalCtx::default();
    product_update_ctx(state, action, &mut ctx)
}

pub(crate) fn product_update_ctx(
    state: &State,
    action: &Action,
    ctx: &mut EvalCtx,
) -> Result<State> {
    let product = product_model(state.model(), action.model(), ctx);
    let mut designated = Vec::new();
    for &w in state.designated() {
        for &e in action.designated() {
            if let Some(&idx) = product.pair_index.get(&(w, e)) {
                designated.push(idx);
            }
        }
    }
    if designated.is_empty() {
        return Err(Error::NotApplicable { action: action.name().to_owned() });
    }
    State::new(Arc::clone(&product.model), designated)
}
