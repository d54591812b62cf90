//! Letter-passing tasks on neighborhood graphs.
//!
//! In both scenarios the initial model has one world per possible addressee
//! (every agent except the sender), the letter position is common knowledge
//! in all reachable states, and the goal is that the letter is wherever it is
//! addressed. The returned tasks are the sender's associated tasks.
//!
//! In `mailtell` the sender wrote the letter: they can tell the addressee
//! worlds apart (the task's designated set is the true addressee's world),
//! passes inform the receiver of the addressee, and sequential implicitly
//! coordinated plans exist, following shortest paths. In `mailcheck` even the
//! sender only forwards a closed envelope: nobody distinguishes the addressee
//! worlds initially (the sender's task designates all of them), passing
//! reveals nothing to the receiver, a holder may check whether the letter is
//! for them (privately), and may pass only knowing it is for someone else, so
//! solutions are conditional policies. Passing publicly rules the passer out,
//! which is the communicative side effect that drives coordination. The
//! worst-case execution walks the full path through all agents, checking once
//! per intermediate holder: full-path edges plus N-2 checks (the sender
//! cannot be an addressee and never checks; the last remaining candidate
//! receives a letter that is common-knowledge theirs and never checks).

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::action::{Action, EventModel, Postcondition};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::model::{EpistemicModel, State};
use crate::partition::Partition;
use crate::sig::{AgentId, PropSet, Signature};
use crate::task::PlanningTask;

use super::graph::NeighborhoodGraph;

fn agent_name(node: usize) -> String {
    (node + 1).to_string()
}

/// `a12` for single-digit agent names, `a1-10` otherwise.
pub fn pass_name(graph_n: usize, from: usize, to: usize) -> String {
    if graph_n <= 9 {
        format!("a{}{}", from + 1, to + 1)
    } else {
        format!("a{}-{}", from + 1, to + 1)
    }
}

pub fn check_name(graph_n: usize, agent: usize) -> String {
    if graph_n <= 9 {
        format!("check{}", agent + 1)
    } else {
        format!("check-{}", agent + 1)
    }
}

struct MailBase {
    sig: Arc<Signature>,
    initial: State,
    goal: Formula,
    /// Addressee candidates (nodes), in world order.
    candidates: Vec<usize>,
    at: Vec<crate::sig::PropId>,
    for_: Vec<crate::sig::PropId>,
}

fn mail_base(
    graph: &NeighborhoodGraph,
    sender: usize,
    addressee: usize,
    sender_knows: bool,
) -> Result<MailBase> {
    let n = graph.num_nodes();
    if sender >= n || addressee >= n {
        return Err(Error::InvalidParams("sender or addressee out of range".into()));
    }
    if sender == addressee {
        return Err(Error::InvalidParams("sender and addressee must differ".into()));
    }
    if !graph.is_connected() {
        return Err(Error::InvalidParams("neighborhood graph must be connected".into()));
    }
    let agents: Vec<String> = (0..n).map(agent_name).collect();
    let props: Vec<String> = (0..n)
        .map(|i| format!("at-{}", agent_name(i)))
        .chain((0..n).map(|i| format!("for-{}", agent_name(i))))
        .collect();
    let sig = Signature::new(agents, props)?;
    let at: Vec<_> = (0..n).map(|i| sig.prop(&format!("at-{}", agent_name(i))).unwrap()).collect();
    let for_: Vec<_> =
        (0..n).map(|i| sig.prop(&format!("for-{}", agent_name(i))).unwrap()).collect();

    let candidates: Vec<usize> = (0..n).filter(|&c| c != sender).collect();
    let valuations: Vec<PropSet> = candidates
        .iter()
        .map(|&c| PropSet::from_props(sig.num_props(), [at[sender], for_[c]]))
        .collect();
    let num_worlds = candidates.len();
    let partitions: Vec<Partition> = (0..n)
        .map(|i| {
            if i == sender && sender_knows {
                Partition::identity(num_worlds)
            } else {
                Partition::universal(num_worlds)
            }
        })
        .collect();
    let names: Vec<String> =
        candidates.iter().map(|&c| format!("w{}", agent_name(c))).collect();
    let model = EpistemicModel::new(Arc::clone(&sig), valuations, partitions, Some(names))?;
    let designated = candidates.iter().position(|&c| c == addressee).unwrap() as u32;
    let initial = State::new(model, vec![designated])?;

    let goal = Formula::conj(
        (0..n).map(|i| Formula::implies(Formula::Atom(for_[i]), Formula::Atom(at[i]))),
    );
    Ok(MailBase { sig, initial, goal, candidates, at, for_ })
}

/// Passing informs the receiver of the addressee: one event per candidate,
/// distinguishable only by the receiver.
pub fn mailtell(graph: &NeighborhoodGraph, sender: usize, addressee: usize) -> Result<PlanningTask> {
    let base = mail_base(graph, sender, addressee, true)?;
    let n = graph.num_nodes();
    let num_events = base.candidates.len();
    let mut actions = Vec::new();
    for (i, j) in directed_edges(graph) {
        let pres: Vec<Formula> = base
            .candidates
            .iter()
            .map(|&c| Formula::and(Formula::Atom(base.at[i]), Formula::Atom(base.for_[c])))
            .collect();
        let posts: Vec<Postcondition> = (0..num_events)
            .map(|_| {
                Postcondition::new(&base.sig, vec![(base.at[i], false), (base.at[j], true)])
                    .unwrap()
            })
            .collect();
        let partitions: Vec<Partition> = (0..n)
            .map(|a| {
                if a == j {
                    Partition::identity(num_events)
                } else {
                    Partition::universal(num_events)
                }
            })
            .collect();
        let names: Vec<String> =
            base.candidates.iter().map(|&c| format!("for{}", agent_name(c))).collect();
        let model = EventModel::new(Arc::clone(&base.sig), pres, posts, partitions, Some(names))?;
        let action = Action::new(pass_name(n, i, j), model, (0..num_events as u32).collect())?;
        actions.push((action, AgentId(i as u32)));
    }
    let task = PlanningTask::new(base.initial, actions, base.goal)?;
    Ok(task.perspective(AgentId(sender as u32)))
}

/// Passing reveals nothing and requires the holder to know the letter is for
/// someone else; a private check action senses `for-i` for its owner.
pub fn mailcheck(graph: &NeighborhoodGraph, sender: usize, addressee: usize) -> Result<PlanningTask> {
    let base = mail_base(graph, sender, addressee, false)?;
    let n = graph.num_nodes();
    let mut actions = Vec::new();
    for (i, j) in directed_edges(graph) {
        let pre = Formula::and(
            Formula::Atom(base.at[i]),
            Formula::knows(AgentId(i as u32), Formula::not(Formula::Atom(base.for_[i]))),
        );
        let post =
            Postcondition::new(&base.sig, vec![(base.at[i], false), (base.at[j], true)]).unwrap();
        let partitions: Vec<Partition> = (0..n).map(|_| Partition::identity(1)).collect();
        let model = EventModel::new(
            Arc::clone(&base.sig),
            vec![pre],
            vec![post],
            partitions,
            Some(vec!["move".into()]),
        )?;
        let action = Action::new(pass_name(n, i, j), model, vec![0])?;
        actions.push((action, AgentId(i as u32)));
    }
    for i in 0..n {
        let pres = vec![
            Formula::and(Formula::Atom(base.at[i]), Formula::Atom(base.for_[i])),
            Formula::and(Formula::Atom(base.at[i]), Formula::not(Formula::Atom(base.for_[i]))),
        ];
        let posts = vec![Postcondition::top(), Postcondition::top()];
        let partitions: Vec<Partition> = (0..n)
            .map(|a| if a == i { Partition::identity(2) } else { Partition::universal(2) })
            .collect();
        let model = EventModel::new(
            Arc::clone(&base.sig),
            pres,
            posts,
            partitions,
            Some(vec!["yes".into(), "no".into()]),
        )?;
        let action = Action::new(check_name(n, i), model, vec![0, 1])?;
        actions.push((action, AgentId(i as u32)));
    }
    let task = PlanningTask::new(base.initial, actions, base.goal)?;
    Ok(task.perspective(AgentId(sender as u32)))
}

fn directed_edges(graph: &NeighborhoodGraph) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (u, v) in graph.edges() {
        out.push((u, v));
        out.push((v, u));
    }
    out.sort_unstable();
    out
}

/// Uniformly random distinct (sender, addressee) pair; the convention used
/// for benchmark trials.
pub fn sample_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let sender = rng.random_range(0..n);
    let mut addressee = rng.random_range(0..n - 1);
    if addressee >= sender {
        addressee += 1;
    }
    (sender, addressee)
}
