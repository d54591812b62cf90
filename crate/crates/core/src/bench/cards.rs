//! The restricted Russian card problem: seven cards dealt 3-3-1 to Alice,
//! Bob and Eve. Alice (holding 012) must first truthfully announce a set of
//! five possible hands, then Bob announces Eve's card; afterwards Alice and
//! Bob know the whole deal and Eve has not learned the holder of any card she
//! does not hold herself.
//!
//! The two-stage protocol restriction is encoded with the flag propositions
//! `announced` and `answered`: Alice's announcements require and set the
//! first, Bob's require it and set the second. The flags change uniformly
//! across all worlds under public actions, so they stay common knowledge and
//! add no epistemic distinctions; they only stop the search from chaining
//! announcements.

use std::sync::Arc;

use crate::action::{Action, EventModel, Postcondition};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::model::{EpistemicModel, State};
use crate::partition::Partition;
use crate::sig::{AgentId, PropId, PropSet, Signature};
use crate::task::PlanningTask;

pub const NUM_CARDS: u8 = 7;
pub const ALICE_HAND: Hand = [0, 1, 2];

/// Three cards, sorted ascending.
pub type Hand = [u8; 3];

/// Five hands, sorted; the shape of a first-stage announcement.
pub type HandSet = [Hand; 5];

/// A deal of the seven cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardDeal {
    pub alice: Hand,
    pub bob: Hand,
    pub eve: u8,
}

fn all_hands() -> Vec<Hand> {
    let mut out = Vec::new();
    for a in 0..NUM_CARDS {
        for b in a + 1..NUM_CARDS {
            for c in b + 1..NUM_CARDS {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// All 140 deals, ordered by (alice hand, bob hand).
pub fn all_deals() -> Vec<CardDeal> {
    let mut out = Vec::new();
    for alice in all_hands() {
        let rest: Vec<u8> = (0..NUM_CARDS).filter(|c| !alice.contains(c)).collect();
        for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                for k in j + 1..rest.len() {
                    let bob = [rest[i], rest[j], rest[k]];
                    let eve = *rest.iter().find(|c| !bob.contains(c)).unwrap();
                    out.push(CardDeal { alice, bob, eve });
                }
            }
        }
    }
    out
}

pub fn hand_text(h: &Hand) -> String {
    h.iter().map(u8::to_string).collect()
}

pub fn announcement_name(hs: &HandSet) -> String {
    let parts: Vec<String> = hs.iter().map(hand_text).collect();
    format!("announce-{}", parts.join("-"))
}

pub fn eve_announcement_name(card: u8) -> String {
    format!("announce-eve-{card}")
}

/// The generator handle: signature, initial state and candidate list are
/// built once; tasks with any subset of first-stage announcements derive
/// from it.
pub struct RussianCards {
    sig: Arc<Signature>,
    initial: State,
    goal: Formula,
    candidates: Vec<HandSet>,
    /// has(agent, card) propositions: `props[agent][card]`.
    props: [Vec<PropId>; 3],
    announced: PropId,
    answered: PropId,
    alice: AgentId,
    bob: AgentId,
}

pub fn russian_cards() -> RussianCards {
    let agents = ["alice", "bob", "eve"];
    let prop_names: Vec<String> = agents
        .iter()
        .flat_map(|a| (0..NUM_CARDS).map(move |c| format!("{a}-{c}")))
        .chain(["announced".to_owned(), "answered".to_owned()])
        .collect();
    let sig = Signature::new(agents, prop_names).expect("fixed signature");
    let props: [Vec<PropId>; 3] = std::array::from_fn(|a| {
        (0..NUM_CARDS).map(|c| sig.prop(&format!("{}-{c}", agents[a])).unwrap()).collect()
    });

    let deals = all_deals();
    let valuations: Vec<PropSet> = deals
        .iter()
        .map(|d| {
            let mut ps = PropSet::empty(sig.num_props());
            for &c in &d.alice {
                ps.insert(props[0][c as usize]);
            }
            for &c in &d.bob {
                ps.insert(props[1][c as usize]);
            }
            ps.insert(props[2][d.eve as usize]);
            ps
        })
        .collect();

    // Agents distinguish exactly the worlds where their own hand differs.
    let group_by = |of: &dyn Fn(&CardDeal) -> Vec<u8>| {
        let mut blocks: std::collections::BTreeMap<Vec<u8>, Vec<u32>> = Default::default();
        for (w, d) in deals.iter().enumerate() {
            blocks.entry(of(d)).or_default().push(w as u32);
        }
        let blocks: Vec<Vec<u32>> = blocks.into_values().collect();
        Partition::from_blocks(deals.len(), &blocks).expect("hands partition the deals")
    };
    let partitions = vec![
        group_by(&|d: &CardDeal| d.alice.to_vec()),
        group_by(&|d: &CardDeal| d.bob.to_vec()),
        group_by(&|d: &CardDeal| vec![d.eve]),
    ];

    let names: Vec<String> = deals
        .iter()
        .map(|d| format!("d{}-{}-{}", hand_text(&d.alice), hand_text(&d.bob), d.eve))
        .collect();
    let model = EpistemicModel::new(Arc::clone(&sig), valuations, partitions, Some(names))
        .expect("valid model");

    // Alice's task: designated worlds are the four deals with her true hand.
    let designated: Vec<u32> = deals
        .iter()
        .enumerate()
        .filter(|(_, d)| d.alice == ALICE_HAND)
        .map(|(w, _)| w as u32)
        .collect();
    let initial = State::new(model, designated).expect("four deals with hand 012");

    let alice = sig.agent("alice").unwrap();
    let bob = sig.agent("bob").unwrap();
    let eve = sig.agent("eve").unwrap();

    // Alice knows Bob's hand, Bob knows Alice's, and Eve learns the holder of
    // no card she does not hold herself.
    let mut conjuncts = Vec::new();
    for &p in &props[1] {
        conjuncts.push(Formula::implies(
            Formula::Atom(p),
            Formula::knows(alice, Formula::Atom(p)),
        ));
    }
    for &p in &props[0] {
        conjuncts.push(Formula::implies(
            Formula::Atom(p),
            Formula::knows(bob, Formula::Atom(p)),
        ));
    }
    for (c, &eve_has) in props[2].iter().enumerate() {
        for holder in [0usize, 1] {
            conjuncts.push(Formula::implies(
                Formula::not(Formula::Atom(eve_has)),
                Formula::not(Formula::knows(eve, Formula::Atom(props[holder][c]))),
            ));
        }
    }
    let goal = Formula::conj(conjuncts);

    // Truthful announcements: five-element sets of hands containing 012.
    let others: Vec<Hand> = all_hands().into_iter().filter(|h| *h != ALICE_HAND).collect();
    let mut candidates = Vec::new();
    let m = others.len();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                for d in c + 1..m {
                    let mut hs = [ALICE_HAND, others[a], others[b], others[c], others[d]];
                    hs.sort_unstable();
                    candidates.push(hs);
                }
            }
        }
    }

    let announced = sig.prop("announced").unwrap();
    let answered = sig.prop("answered").unwrap();
    RussianCards { sig, initial, goal, candidates, props, announced, answered, alice, bob }
}

impl RussianCards {
    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    /// All first-stage announcement candidates (46376 of them).
    pub fn candidates(&self) -> &[HandSet] {
        &self.candidates
    }

    /// The published solution set: 012, 034, 156, 236, 245.
    pub fn solution_announcement() -> HandSet {
        [[0, 1, 2], [0, 3, 4], [1, 5, 6], [2, 3, 6], [2, 4, 5]]
    }

    fn announcement_action(&self, hs: &HandSet) -> Action {
        // The stage flag comes first so inapplicable announcements are
        // rejected without touching the hand disjunction.
        let pre = Formula::and(
            Formula::not(Formula::Atom(self.announced)),
            Formula::disj(hs.iter().map(|hand| {
                Formula::conj(hand.iter().map(|&c| Formula::Atom(self.props[0][c as usize])))
            })),
        );
        let post = Postcondition::new(&self.sig, vec![(self.announced, true)]).unwrap();
        let model = EventModel::new(
            Arc::clone(&self.sig),
            vec![pre],
            vec![post],
            vec![Partition::identity(1); 3],
            Some(vec!["say".into()]),
        )
        .expect("valid event model");
        Action::new(announcement_name(hs), model, vec![0]).expect("single designated event")
    }

    fn eve_actions(&self) -> Vec<(Action, AgentId)> {
        (0..NUM_CARDS)
            .map(|c| {
                let pre = Formula::conj([
                    Formula::Atom(self.announced),
                    Formula::not(Formula::Atom(self.answered)),
                    Formula::Atom(self.props[2][c as usize]),
                ]);
                let post =
                    Postcondition::new(&self.sig, vec![(self.answered, true)]).unwrap();
                let model = EventModel::new(
                    Arc::clone(&self.sig),
                    vec![pre],
                    vec![post],
                    vec![Partition::identity(1); 3],
                    Some(vec!["say".into()]),
                )
                .expect("valid event model");
                let action = Action::new(eve_announcement_name(c), model, vec![0])
                    .expect("single designated event");
                (action, self.bob)
            })
            .collect()
    }

    /// Task restricted to the given first-stage announcements (plus Bob's
    /// seven second-stage announcements).
    pub fn task_with(&self, announcements: &[HandSet]) -> Result<PlanningTask> {
        for hs in announcements {
            if !hs.contains(&ALICE_HAND) {
                return Err(Error::InvalidParams(format!(
                    "announcement {} does not contain Alice's hand",
                    announcement_name(hs)
                )));
            }
        }
        let mut actions: Vec<(Action, AgentId)> = announcements
            .iter()
            .map(|hs| (self.announcement_action(hs), self.alice))
            .collect();
        actions.extend(self.eve_actions());
        PlanningTask::new(self.initial.clone(), actions, self.goal.clone())
    }

    /// The unrestricted task with all 46376 first-stage candidates; synthesis
    /// over it is the long-running mode.
    pub fn full_task(&self) -> PlanningTask {
        self.task_with(&self.candidates.clone()).expect("candidates contain 012")
    }
}
