//! Signatures: the fixed vocabulary of agents and atomic propositions that a
//! planning task is defined over. All models, actions and formulas of one task
//! share a single signature; identifiers are resolved to dense indices once,
//! at construction time.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of an agent in its signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

/// Index of an atomic proposition in its signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PropId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered sets of agent and proposition names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    agents: Vec<String>,
    props: Vec<String>,
}

impl Signature {
    pub fn new<A, P>(agents: A, props: P) -> Result<Arc<Self>>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let agents: Vec<String> = agents.into_iter().map(Into::into).collect();
        let props: Vec<String> = props.into_iter().map(Into::into).collect();
        if agents.is_empty() {
            return Err(Error::Empty("agent set"));
        }
        if props.is_empty() {
            return Err(Error::Empty("proposition set"));
        }
        for (what, names) in [("agent", &agents), ("proposition", &props)] {
            for (i, n) in names.iter().enumerate() {
                if names[..i].contains(n) {
                    return Err(Error::Duplicate { what, name: n.clone() });
                }
            }
        }
        Ok(Arc::new(Signature { agents, props }))
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn num_props(&self) -> usize {
        self.props.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.agents.len() as u32).map(AgentId)
    }

    pub fn agent(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name).map(|i| AgentId(i as u32))
    }

    pub fn agent_id(&self, name: &str) -> Result<AgentId> {
        self.agent(name).ok_or_else(|| Error::UnknownAgent(name.to_owned()))
    }

    pub fn prop(&self, name: &str) -> Option<PropId> {
        self.props.iter().position(|p| p == name).map(|i| PropId(i as u32))
    }

    pub fn prop_id(&self, name: &str) -> Result<PropId> {
        self.prop(name).ok_or_else(|| Error::UnknownProp(name.to_owned()))
    }

    pub fn agent_name(&self, id: AgentId) -> &str {
        &self.agents[id.index()]
    }

    pub fn prop_name(&self, id: PropId) -> &str {
        &self.props[id.index()]
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agents
    }

    pub fn prop_names(&self) -> &[String] {
        &self.props
    }
}

/// Set of propositions, stored as a fixed-width bitmask sized by the signature.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropSet {
    words: Box<[u64]>,
}

impl PropSet {
    pub fn empty(num_props: usize) -> Self {
        PropSet { words: vec![0u64; num_props.div_ceil(64)].into_boxed_slice() }
    }

    pub fn from_props(num_props: usize, props: impl IntoIterator<Item = PropId>) -> Self {
        let mut s = Self::empty(num_props);
        for p in props {
            s.insert(p);
        }
        s
    }

    pub fn contains(&self, p: PropId) -> bool {
        self.words[p.index() / 64] >> (p.index() % 64) & 1 == 1
    }

    pub fn insert(&mut self, p: PropId) {
        self.words[p.index() / 64] |= 1 << (p.index() % 64);
    }

    pub fn remove(&mut self, p: PropId) {
        self.words[p.index() / 64] &= !(1 << (p.index() % 64));
    }

    pub fn iter(&self) -> impl Iterator<Item = PropId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| PropId((wi * 64 + b) as u32))
        })
    }

    pub(crate) fn write_bytes(&self, out: &mut Vec<u8>) {
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
}

impl fmt::Debug for PropSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|p| p.0)).finish()
    }
}
