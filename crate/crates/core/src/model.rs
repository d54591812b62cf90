//! Epistemic models and states: finite Kripke structures with one
//! indistinguishability partition per agent, plus a designated world set.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::sig::{AgentId, PropSet, Signature};

/// A finite S5 Kripke model. Immutable after construction and freely shared.
#[derive(Debug)]
pub struct EpistemicModel {
    sig: Arc<Signature>,
    valuations: Box<[PropSet]>,
    partitions: Box<[Partition]>,
    world_names: Option<Box<[String]>>,
    /// For worlds created by a product update: (parent world, event).
    provenance: Option<Box<[(u32, u32)]>>,
    /// Connected components of the union of all agents' relations, computed
    /// once on first common-knowledge query.
    components: OnceLock<Box<[u32]>>,
}

impl EpistemicModel {
    pub fn new(
        sig: Arc<Signature>,
        valuations: Vec<PropSet>,
        partitions: Vec<Partition>,
        world_names: Option<Vec<String>>,
    ) -> Result<Arc<Self>> {
        let n = valuations.len();
        if n == 0 {
            return Err(Error::Empty("world set"));
        }
        if partitions.len() != sig.num_agents() {
            return Err(Error::InvalidPartition(
                "one indistinguishability partition per agent is required".into(),
            ));
        }
        for p in &partitions {
            if p.len() != n {
                return Err(Error::InvalidPartition(format!(
                    "partition covers {} worlds, model has {n}",
                    p.len()
                )));
            }
        }
        if let Some(names) = &world_names {
            if names.len() != n {
                return Err(Error::InvalidParams("one name per world required".into()));
            }
        }
        Ok(Arc::new(EpistemicModel {
            sig,
            valuations: valuations.into_boxed_slice(),
            partitions: partitions.into_boxed_slice(),
            world_names: world_names.map(Vec::into_boxed_slice),
            provenance: None,
            components: OnceLock::new(),
        }))
    }

    pub(crate) fn with_provenance(
        sig: Arc<Signature>,
        valuations: Vec<PropSet>,
        partitions: Vec<Partition>,
        provenance: Vec<(u32, u32)>,
    ) -> Arc<Self> {
        Arc::new(EpistemicModel {
            sig,
            valuations: valuations.into_boxed_slice(),
            partitions: partitions.into_boxed_slice(),
            world_names: None,
            provenance: Some(provenance.into_boxed_slice()),
            components: OnceLock::new(),
        })
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn num_worlds(&self) -> usize {
        self.valuations.len()
    }

    pub fn worlds(&self) -> impl Iterator<Item = u32> {
        0..self.num_worlds() as u32
    }

    pub fn valuation(&self, w: u32) -> &PropSet {
        &self.valuations[w as usize]
    }

    pub fn partition(&self, i: AgentId) -> &Partition {
        &self.partitions[i.index()]
    }

    pub fn world_name(&self, w: u32) -> String {
        match &self.world_names {
            Some(names) => names[w as usize].clone(),
            None => format!("w{w}"),
        }
    }

    /// Provenance of a product-update world, if this model came from one.
    pub fn provenance(&self, w: u32) -> Option<(u32, u32)> {
        self.provenance.as_ref().map(|p| p[w as usize])
    }

    /// Component id of `w` in the transitive closure of the union of all
    /// agents' relations. Write-once, safe under concurrent readers.
    pub(crate) fn component_of(&self, w: u32) -> u32 {
        let comps = self.components.get_or_init(|| {
            let n = self.num_worlds();
            let mut comp = vec![u32::MAX; n];
            let mut next = 0u32;
            let mut stack = Vec::new();
            for start in 0..n as u32 {
                if comp[start as usize] != u32::MAX {
                    continue;
                }
                comp[start as usize] = next;
                stack.push(start);
                while let Some(v) = stack.pop() {
                    for p in self.partitions.iter() {
                        for &u in p.class_of(v) {
                            if comp[u as usize] == u32::MAX {
                                comp[u as usize] = next;
                                stack.push(u);
                            }
                        }
                    }
                }
                next += 1;
            }
            comp.into_boxed_slice()
        });
        comps[w as usize]
    }
}

/// An epistemic model plus a non-empty designated world set.
#[derive(Debug, Clone)]
pub struct State {
    model: Arc<EpistemicModel>,
    designated: Arc<[u32]>,
}

impl State {
    pub fn new(model: Arc<EpistemicModel>, mut designated: Vec<u32>) -> Result<Self> {
        designated.sort_unstable();
        designated.dedup();
        if designated.is_empty() {
            return Err(Error::Empty("designated world set"));
        }
        if designated.last().copied().unwrap() as usize >= model.num_worlds() {
            return Err(Error::InvalidParams("designated world out of range".into()));
        }
        Ok(State { model, designated: designated.into() })
    }

    pub fn model(&self) -> &Arc<EpistemicModel> {
        &self.model
    }

    pub fn sig(&self) -> &Arc<Signature> {
        self.model.sig()
    }

    /// Sorted designated worlds.
    pub fn designated(&self) -> &[u32] {
        &self.designated
    }

    pub fn is_global(&self) -> bool {
        self.designated.len() == 1
    }

    /// A state is local for `i` when its designated set is closed under `i`'s
    /// indistinguishability.
    pub fn is_local_for(&self, i: AgentId) -> bool {
        self.model.partition(i).is_closed(&self.designated)
    }

    /// Agent `i`'s view of this state: the designated set closed under `i`'s
    /// relation, on the same model. Idempotent per agent.
    pub fn perspective_shift(&self, i: AgentId) -> State {
        if self.is_local_for(i) {
            return self.clone();
        }
        let closed = self.model.partition(i).close(&self.designated);
        State { model: Arc::clone(&self.model), designated: closed.into() }
    }

    /// One global state per designated world, in world-index order.
    pub fn globals(&self) -> Vec<State> {
        self.designated
            .iter()
            .map(|&w| State { model: Arc::clone(&self.model), designated: vec![w].into() })
            .collect()
    }

    /// The single designated world of a global state.
    pub fn actual_world(&self) -> Result<u32> {
        if self.is_global() {
            Ok(self.designated[0])
        } else {
            Err(Error::NotGlobal)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::PropId;

    /// The two-world model of the door-mat scenario: `w` satisfies `m`,
    /// `v` does not, bob cannot tell them apart.
    pub(crate) fn mat_state() -> State {
        let sig = Signature::new(["anne", "bob"], ["m", "h"]).unwrap();
        let nprops = sig.num_props();
        let m = sig.prop("m").unwrap();
        let model = EpistemicModel::new(
            Arc::clone(&sig),
            vec![PropSet::from_props(nprops, [m]), PropSet::empty(nprops)],
            vec![Partition::identity(2), Partition::universal(2)],
            Some(vec!["w".into(), "v".into()]),
        )
        .unwrap();
        State::new(model, vec![0]).unwrap()
    }

    #[test]
    fn shift_to_bob_closes_designated() {
        let s = mat_state();
        let bob = s.sig().agent("bob").unwrap();
        let shifted = s.perspective_shift(bob);
        assert_eq!(shifted.designated(), &[0, 1]);
        assert!(shifted.is_local_for(bob));
    }

    #[test]
    fn shift_is_identity_on_local_states() {
        let s = mat_state();
        let anne = s.sig().agent("anne").unwrap();
        assert!(s.is_local_for(anne));
        assert_eq!(s.perspective_shift(anne).designated(), s.designated());
        let bob = s.sig().agent("bob").unwrap();
        assert!(!s.is_local_for(bob));
    }

    #[test]
    fn globals_enumerates_designated() {
        let s = mat_state();
        let bob = s.sig().agent("bob").unwrap();
        let shifted = s.perspective_shift(bob);
        let globals = shifted.globals();
        assert_eq!(globals.len(), shifted.designated().len());
        assert_eq!(globals[0].designated(), &[0]);
        assert_eq!(globals[1].designated(), &[1]);
        assert_eq!(s.globals().len(), 1);
        assert_eq!(s.globals()[0].designated(), s.designated());
    }

    #[test]
    fn shift_idempotent_on_random_models() {
        let mut rng = crate::random::rng(19);
        let sig = Signature::new(["a", "b", "c"], ["p", "q"]).unwrap();
        for _ in 0..100 {
            let s = crate::random::random_state(&mut rng, &sig, 5);
            for i in sig.agents() {
                let once = s.perspective_shift(i);
                let twice = once.perspective_shift(i);
                assert_eq!(once.designated(), twice.designated());
                assert!(once.is_local_for(i));
                assert_eq!(s.globals().len(), s.designated().len());
            }
        }
    }

    #[test]
    fn universal_designated_local_for_everyone() {
        let s = mat_state();
        let all = State::new(Arc::clone(s.model()), vec![0, 1]).unwrap();
        for i in s.sig().agents() {
            assert!(all.is_local_for(i));
        }
    }

    #[test]
    fn prop_set_ops() {
        let mut ps = PropSet::empty(70);
        ps.insert(PropId(3));
        ps.insert(PropId(68));
        assert!(ps.contains(PropId(3)));
        assert!(ps.contains(PropId(68)));
        assert!(!ps.contains(PropId(4)));
        assert_eq!(ps.iter().count(), 2);
        ps.remove(PropId(3));
        assert!(!ps.contains(PropId(3)));
    }
}
