//! Equivalence relations stored as partitions. Indistinguishability in S5
//! models is always an equivalence, so a block list with an element-to-block
//! index gives O(1) membership tests and cheap closures.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block_of: Box<[u32]>,
    blocks: Box<[Box<[u32]>]>,
}

impl Partition {
    /// Builds a partition of `0..n` from explicit blocks. Elements not listed
    /// in any block become singletons.
    pub fn from_blocks(n: usize, listed: &[Vec<u32>]) -> Result<Self> {
        let mut block_of = vec![u32::MAX; n];
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        for block in listed {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            let id = blocks.len() as u32;
            let mut sorted = block.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != block.len() {
                return Err(Error::InvalidPartition("repeated element within a block".into()));
            }
            for &x in &sorted {
                if x as usize >= n {
                    return Err(Error::InvalidPartition(format!("element {x} out of range")));
                }
                if block_of[x as usize] != u32::MAX {
                    return Err(Error::InvalidPartition(format!("element {x} in two blocks")));
                }
                block_of[x as usize] = id;
            }
            blocks.push(sorted);
        }
        for (x, b) in block_of.iter_mut().enumerate() {
            if *b == u32::MAX {
                *b = blocks.len() as u32;
                blocks.push(vec![x as u32]);
            }
        }
        Ok(Partition {
            block_of: block_of.into_boxed_slice(),
            blocks: blocks.into_iter().map(Vec::into_boxed_slice).collect(),
        })
    }

    /// The discrete partition: every element alone.
    pub fn identity(n: usize) -> Self {
        Partition {
            block_of: (0..n as u32).collect(),
            blocks: (0..n as u32).map(|x| vec![x].into_boxed_slice()).collect(),
        }
    }

    /// The trivial partition: one block with everything.
    pub fn universal(n: usize) -> Self {
        Partition {
            block_of: vec![0; n].into_boxed_slice(),
            blocks: vec![(0..n as u32).collect()].into_boxed_slice(),
        }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, x: u32) -> u32 {
        self.block_of[x as usize]
    }

    /// Elements of block `b`, sorted ascending.
    pub fn block(&self, b: u32) -> &[u32] {
        &self.blocks[b as usize]
    }

    /// The block containing `x`.
    pub fn class_of(&self, x: u32) -> &[u32] {
        self.block(self.block_of(x))
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.blocks.iter().map(|b| &**b)
    }

    pub fn same_block(&self, x: u32, y: u32) -> bool {
        self.block_of(x) == self.block_of(y)
    }

    /// Is the sorted set closed under this partition?
    pub fn is_closed(&self, sorted: &[u32]) -> bool {
        sorted.iter().all(|&x| {
            self.class_of(x).iter().all(|y| sorted.binary_search(y).is_ok())
        })
    }

    /// Closure of the set under this partition, returned sorted.
    pub fn close(&self, set: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.blocks.len()];
        let mut out = Vec::new();
        for &x in set {
            let b = self.block_of(x);
            if !seen[b as usize] {
                seen[b as usize] = true;
                out.extend_from_slice(self.block(b));
            }
        }
        out.sort_unstable();
        out
    }
}
