//! Bisimulation contraction and canonical state keys.
//!
//! Worlds are contracted to their coarsest bisimulation quotient via
//! partition refinement with valuations as the initial splitter; the
//! designated set is carried over as the set of classes containing designated
//! worlds. Two states are identified exactly when their quotients are
//! isomorphic with matching designated classes, which is bisimilarity of
//! multi-pointed models. Keeping the designated flag out of the world
//! refinement matters: a state designating one of two twin worlds is
//! bisimilar to the state designating their merged class, and both must key
//! identically for policy lookups to work. On finite S5 models bisimilarity
//! coincides with modal equivalence, so the key doubles as a
//! duplicate-detection key in search.
//!
//! The refinement ranks signature tuples deterministically, which yields a
//! canonical world order on the quotient; serializing the quotient in that
//! order makes byte equality coincide with bisimilarity, and the serialized
//! form is hashed into a fixed-width key.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, ParseError};
use crate::model::{EpistemicModel, State};
use crate::partition::Partition;
use crate::sig::PropSet;

/// 256-bit fingerprint of a canonical quotient.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey([u8; 32]);

impl StateKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Short prefix used in human-readable output.
    pub fn short(&self) -> String {
        let hex = self.to_string();
        hex[..12].to_owned()
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateKey({})", self.short())
    }
}

impl FromStr for StateKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.len() != 64 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ParseError::new(1, 1, format!("malformed state key `{s}`")).into());
        }
        let mut out = [0u8; 32];
        for (i, chunk) in s.as_bytes().chunks(2).enumerate() {
            let hi = (chunk[0] as char).to_digit(16).unwrap() as u8;
            let lo = (chunk[1] as char).to_digit(16).unwrap() as u8;
            out[i] = hi << 4 | lo;
        }
        Ok(StateKey(out))
    }
}

/// A state contracted to its bisimulation quotient, in canonical world order.
#[derive(Debug, Clone)]
pub struct CanonicalState {
    state: State,
    bytes: Arc<[u8]>,
    key: StateKey,
}

impl CanonicalState {
    /// The quotient state (one world per bisimulation class).
    pub fn state(&self) -> &State {
        &self.state
    }

    /// Full canonical serialization; equal iff the originals are bisimilar.
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn key(&self) -> StateKey {
        self.key
    }
}

/// Refines worlds into bisimulation classes. Returns a canonical color per
/// world: colors are ranks of deterministically ordered signature tuples, so
/// they are independent of the input world numbering.
fn refine(model: &EpistemicModel) -> (Vec<u32>, usize) {
    let n = model.num_worlds();
    let num_agents = model.sig().num_agents();

    let mut tagged: Vec<(Vec<u8>, u32)> = (0..n as u32)
        .map(|w| {
            let mut bytes = Vec::new();
            model.valuation(w).write_bytes(&mut bytes);
            (bytes, w)
        })
        .collect();
    tagged.sort();
    let mut colors = vec![0u32; n];
    let mut num_colors = 0usize;
    for (i, (bytes, w)) in tagged.iter().enumerate() {
        if i > 0 && *bytes != tagged[i - 1].0 {
            num_colors += 1;
        }
        colors[*w as usize] = num_colors as u32;
    }
    num_colors += 1;

    loop {
        // Signature: own color plus, per agent, the set of colors reachable
        // through that agent's relation. The set is shared by every world of
        // an agent block, so compute it once per block and rank the distinct
        // sets; ranks are canonical because the sets are sorted by content.
        let mut block_rank: Vec<Vec<u32>> = Vec::with_capacity(num_agents);
        for i in model.sig().agents() {
            let partition = model.partition(i);
            let sets: Vec<Vec<u32>> = partition
                .blocks()
                .map(|block| {
                    let mut set: Vec<u32> =
                        block.iter().map(|&v| colors[v as usize]).collect();
                    set.sort_unstable();
                    set.dedup();
                    set
                })
                .collect();
            let mut distinct: Vec<&Vec<u32>> = sets.iter().collect();
            distinct.sort();
            distinct.dedup();
            let rank = sets
                .iter()
                .map(|s| distinct.binary_search(&s).unwrap() as u32)
                .collect();
            block_rank.push(rank);
        }
        let mut sigs: Vec<(Vec<u32>, u32)> = (0..n as u32)
            .map(|w| {
                let mut sig = Vec::with_capacity(num_agents + 1);
                sig.push(colors[w as usize]);
                for (i, ranks) in block_rank.iter().enumerate() {
                    let block = model.partition(crate::sig::AgentId(i as u32)).block_of(w);
                    sig.push(ranks[block as usize]);
                }
                (sig, w)
            })
            .collect();
        sigs.sort();
        let mut next = vec![0u32; n];
        let mut count = 0usize;
        for (i, (sig, w)) in sigs.iter().enumerate() {
            if i > 0 && *sig != sigs[i - 1].0 {
                count += 1;
            }
            next[*w as usize] = count as u32;
        }
        count += 1;
        if count == num_colors {
            return (colors, num_colors);
        }
        colors = next;
        num_colors = count;
    }
}

/// Contracts a state to its canonical bisimulation quotient.
pub fn contract(state: &State) -> CanonicalState {
    let model = state.model();
    let sig = model.sig();
    let (colors, k) = refine(model);

    // Representative original world per class.
    let mut rep = vec![u32::MAX; k];
    for w in model.worlds() {
        let c = colors[w as usize] as usize;
        if rep[c] == u32::MAX {
            rep[c] = w;
        }
    }

    let valuations: Vec<PropSet> =
        rep.iter().map(|&w| model.valuation(w).clone()).collect();

    // The designated set carries over as the set of designated classes.
    let mut designated: Vec<u32> =
        state.designated().iter().map(|&w| colors[w as usize]).collect();
    designated.sort_unstable();
    designated.dedup();

    // Quotient relations: classes are i-related iff some members are, which
    // at the fixpoint means equal per-agent color sets.
    let partitions: Vec<Partition> = sig
        .agents()
        .map(|i| {
            let mut sig_of: Vec<(Vec<u32>, u32)> = (0..k)
                .map(|c| {
                    let mut set: Vec<u32> = model
                        .partition(i)
                        .class_of(rep[c])
                        .iter()
                        .map(|&v| colors[v as usize])
                        .collect();
                    set.sort_unstable();
                    set.dedup();
                    (set, c as u32)
                })
                .collect();
            sig_of.sort();
            let mut blocks: Vec<Vec<u32>> = Vec::new();
            for (idx, (set, c)) in sig_of.iter().enumerate() {
                if idx == 0 || *set != sig_of[idx - 1].0 {
                    blocks.push(Vec::new());
                }
                blocks.last_mut().unwrap().push(*c);
            }
            Partition::from_blocks(k, &blocks).expect("refinement yields a partition")
        })
        .collect();

    let mut bytes = Vec::new();
    bytes.extend_from_slice(&(k as u32).to_le_bytes());
    bytes.extend_from_slice(&(sig.num_agents() as u32).to_le_bytes());
    bytes.extend_from_slice(&(sig.num_props() as u32).to_le_bytes());
    for c in 0..k as u32 {
        bytes.push(u8::from(designated.binary_search(&c).is_ok()));
        valuations[c as usize].write_bytes(&mut bytes);
    }
    for p in &partitions {
        // Block ids normalized by first occurrence over the canonical order.
        let mut norm = vec![u32::MAX; p.num_blocks()];
        let mut next = 0u32;
        for c in 0..k as u32 {
            let b = p.block_of(c) as usize;
            if norm[b] == u32::MAX {
                norm[b] = next;
                next += 1;
            }
            bytes.extend_from_slice(&norm[b].to_le_bytes());
        }
    }

    let key = StateKey(Sha256::digest(&bytes).into());
    let quotient = EpistemicModel::new(Arc::clone(sig), valuations, partitions, None)
        .expect("quotient is a valid model");
    let state = State::new(quotient, designated).expect("quotient keeps designated worlds");
    CanonicalState { state, bytes: bytes.into(), key }
}

/// Bisimilarity test through canonical forms.
pub fn equivalent(s: &State, t: &State) -> bool {
    debug_assert_eq!(s.sig().as_ref(), t.sig().as_ref(), "states over different signatures");
    contract(s).bytes() == contract(t).bytes()
}
