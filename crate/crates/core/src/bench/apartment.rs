//! The door-mat scenario: Anne may announce that the key is under the mat,
//! Bob may attempt to take it. Small enough to check every planning notion
//! by hand.

use std::sync::Arc;

use crate::action::{Action, EventModel, Postcondition};
use crate::formula::Formula;
use crate::model::{EpistemicModel, State};
use crate::partition::Partition;
use crate::sig::{PropSet, Signature};
use crate::task::PlanningTask;

/// Anne knows the key is under the mat, Bob does not; the goal is for Bob to
/// hold the key. With `with_announce`, Anne can publicly announce the key's
/// location, which is what makes an implicitly coordinated plan for her
/// possible.
pub fn apartment(with_announce: bool) -> PlanningTask {
    let sig = Signature::new(["anne", "bob"], ["m", "h"]).expect("fixed signature");
    let m = sig.prop("m").unwrap();
    let h = sig.prop("h").unwrap();
    let anne = sig.agent("anne").unwrap();
    let bob = sig.agent("bob").unwrap();

    let model = EpistemicModel::new(
        Arc::clone(&sig),
        vec![PropSet::from_props(sig.num_props(), [m]), PropSet::empty(sig.num_props())],
        vec![Partition::identity(2), Partition::universal(2)],
        Some(vec!["w".into(), "v".into()]),
    )
    .expect("valid model");
    let initial = State::new(model, vec![0]).expect("w is designated");

    // try-take: succeeds when the key is there, otherwise nothing happens;
    // Anne is not around to see which.
    let try_take_model = EventModel::new(
        Arc::clone(&sig),
        vec![Formula::Atom(m), Formula::not(Formula::Atom(m))],
        vec![
            Postcondition::new(&sig, vec![(h, true), (m, false)]).unwrap(),
            Postcondition::top(),
        ],
        vec![Partition::universal(2), Partition::identity(2)],
        Some(vec!["e".into(), "f".into()]),
    )
    .expect("valid event model");
    let try_take = Action::new("try-take", try_take_model, vec![0, 1]).unwrap();

    let mut actions = vec![(try_take, bob)];
    if with_announce {
        let announce_model = EventModel::new(
            Arc::clone(&sig),
            vec![Formula::Atom(m)],
            vec![Postcondition::top()],
            vec![Partition::identity(1), Partition::identity(1)],
            Some(vec!["e".into()]),
        )
        .expect("valid event model");
        let announce = Action::new("announce", announce_model, vec![0]).unwrap();
        actions.push((announce, anne));
    }

    PlanningTask::new(initial, actions, Formula::Atom(h)).expect("actions are local")
}

/// The three-agent letter chain: agent 1 holds a letter for agent 3 and can
/// only pass via agent 2. Equal to `mailtell` on the path 1 - 2 - 3.
pub fn letter() -> PlanningTask {
    super::mail::mailtell(&super::graph::NeighborhoodGraph::path(3), 0, 2)
        .expect("path endpoints are distinct")
}
