//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream whose 256-bit
//! key is the tuple `(master seed, purpose, generation, index)`, each packed
//! as a little-endian `u64`. Distinct tuples give independent streams, so the
//! draws made for one individual never depend on how many other streams were
//! consumed before it, or on which thread ran first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. The discriminant is part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    FoldShuffle = 1,
    HoldoutSplit = 2,
    InitialPopulation = 3,
    Selection = 4,
    Breeding = 5,
}

pub fn stream(master: u64, purpose: Purpose, generation: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&generation.to_le_bytes());
    key[24..32].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
