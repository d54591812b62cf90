//! Seeded generators of random models, states, formulas and planning tasks.
//! Used by the property suites; all output is a pure function of the seed.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::{Action, EventModel, Postcondition};
use crate::formula::Formula;
use crate::model::{EpistemicModel, State};
use crate::partition::Partition;
use crate::sig::{AgentId, PropId, PropSet, Signature};
use crate::task::PlanningTask;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    let num_blocks = rng.random_range(1..=n);
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); num_blocks];
    for x in 0..n as u32 {
        blocks[rng.random_range(0..num_blocks)].push(x);
    }
    blocks.retain(|b| !b.is_empty());
    Partition::from_blocks(n, &blocks).expect("generated blocks partition the domain")
}

pub fn random_model(
    rng: &mut ChaCha8Rng,
    sig: &Arc<Signature>,
    num_worlds: usize,
) -> Arc<EpistemicModel> {
    let valuations = (0..num_worlds)
        .map(|_| {
            PropSet::from_props(
                sig.num_props(),
                (0..sig.num_props() as u32).filter(|_| rng.random_bool(0.5)).map(PropId),
            )
        })
        .collect();
    let partitions = (0..sig.num_agents()).map(|_| random_partition(rng, num_worlds)).collect();
    EpistemicModel::new(Arc::clone(sig), valuations, partitions, None).expect("valid model")
}

pub fn random_state(rng: &mut ChaCha8Rng, sig: &Arc<Signature>, num_worlds: usize) -> State {
    let model = random_model(rng, sig, num_worlds);
    random_state_of(rng, &model)
}

pub fn random_state_of(rng: &mut ChaCha8Rng, model: &Arc<EpistemicModel>) -> State {
    let n = model.num_worlds();
    let mut designated: Vec<u32> =
        (0..n as u32).filter(|_| rng.random_bool(0.4)).collect();
    if designated.is_empty() {
        designated.push(rng.random_range(0..n as u32));
    }
    State::new(Arc::clone(model), designated).expect("non-empty designated set")
}

/// Random formula of the static language with the given nesting budget.
pub fn random_formula(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize) -> Formula {
    let leaf = depth == 0 || rng.random_bool(0.3);
    if leaf {
        match rng.random_range(0..6) {
            0 => Formula::Top,
            1 => Formula::Bot,
            _ => Formula::Atom(PropId(rng.random_range(0..sig.num_props() as u32))),
        }
    } else {
        match rng.random_range(0..7) {
            0 => Formula::not(random_formula(rng, sig, depth - 1)),
            1 => Formula::and(
                random_formula(rng, sig, depth - 1),
                random_formula(rng, sig, depth - 1),
            ),
            2 => Formula::or(
                random_formula(rng, sig, depth - 1),
                random_formula(rng, sig, depth - 1),
            ),
            3 => Formula::implies(
                random_formula(rng, sig, depth - 1),
                random_formula(rng, sig, depth - 1),
            ),
            4 | 5 => Formula::knows(
                AgentId(rng.random_range(0..sig.num_agents() as u32)),
                random_formula(rng, sig, depth - 1),
            ),
            _ => Formula::common(random_formula(rng, sig, depth - 1)),
        }
    }
}

/// Random literal-conjunction postcondition.
fn random_post(rng: &mut ChaCha8Rng, sig: &Signature) -> Postcondition {
    let mut literals = Vec::new();
    for p in 0..sig.num_props() as u32 {
        if rng.random_bool(0.25) {
            literals.push((PropId(p), rng.random_bool(0.5)));
        }
    }
    Postcondition::new(sig, literals).expect("distinct props cannot conflict")
}

/// Random action local for `owner`: the designated events are a union of the
/// owner's partition blocks.
pub fn random_action(
    rng: &mut ChaCha8Rng,
    sig: &Arc<Signature>,
    name: &str,
    owner: AgentId,
) -> Action {
    let num_events = rng.random_range(1..=3);
    let pres = (0..num_events)
        .map(|_| {
            let depth = rng.random_range(0..=1);
            random_formula(rng, sig, depth)
        })
        .collect();
    let posts = (0..num_events).map(|_| random_post(rng, sig)).collect();
    let partitions: Vec<Partition> =
        (0..sig.num_agents()).map(|_| random_partition(rng, num_events)).collect();
    let owner_partition = partitions[owner.index()].clone();
    let model = EventModel::new(Arc::clone(sig), pres, posts, partitions, None)
        .expect("valid event model");
    let mut designated = Vec::new();
    for block in owner_partition.blocks() {
        if designated.is_empty() || rng.random_bool(0.5) {
            designated.extend_from_slice(block);
        }
    }
    Action::new(name, model, designated).expect("non-empty designated set")
}

/// Random small planning task: every action is local for its random owner and
/// the goal is a shallow formula.
pub fn random_task(rng: &mut ChaCha8Rng, num_agents: usize, num_props: usize) -> PlanningTask {
    let sig = Signature::new(
        (0..num_agents).map(|i| format!("ag{i}")),
        (0..num_props).map(|i| format!("p{i}")),
    )
    .expect("non-empty signature");
    let num_worlds = rng.random_range(2..=5);
    let initial = random_state(rng, &sig, num_worlds);
    let num_actions = rng.random_range(1..=3);
    let actions: Vec<_> = (0..num_actions)
        .map(|i| {
            let owner = AgentId(rng.random_range(0..num_agents as u32));
            (random_action(rng, &sig, &format!("act{i}"), owner), owner)
        })
        .collect();
    let goal = random_formula(rng, &sig, 2);
    PlanningTask::new(initial, actions, goal).expect("generated actions are local")
}
