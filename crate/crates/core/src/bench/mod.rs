//! Deterministic generators for the benchmark scenarios: the apartment
//! (door-mat) task, the three-agent letter chain, letter passing on
//! Watts-Strogatz networks in telling and checking variants, and the
//! restricted Russian card problem. All generators are pure functions of
//! their parameters and seeds.

pub mod apartment;
pub mod cards;
pub mod graph;
pub mod mail;

pub use apartment::{apartment, letter};
pub use cards::{russian_cards, CardDeal, Hand, HandSet, RussianCards};
pub use graph::{watts_strogatz, NeighborhoodGraph, WsParams};
pub use mail::{mailcheck, mailtell, sample_pair};

use rand_chacha::rand_core::SeedableRng;

/// Deterministic per-trial generator: one ChaCha stream per trial index.
pub fn trial_rng(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
