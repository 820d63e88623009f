//! Deterministic derivation of independent random streams.
//!
//! Every random decision in a run draws from a ChaCha8 stream whose seed is a
//! splitmix64 hash of the master seed and a tag path (seed index, topology,
//! purpose). Parallel and serial executions therefore see identical
//! randomness, which is what makes result files byte-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purpose tags. Appending a new purpose never disturbs existing ones.
pub mod tag {
    pub const DEPLOY: u64 = 0x01;
    pub const TRAIN_DATA: u64 = 0x02;
    pub const TRAIN_MODEL: u64 = 0x03;
    pub const BUILD: u64 = 0x04;
    pub const SIM: u64 = 0x05;
}

/// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a master seed with a tag path into a single sub-seed.
pub fn mix(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t));
    }
    state
}

/// Derive the ChaCha8 stream for a tag path.
pub fn stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(master, tags))
}
