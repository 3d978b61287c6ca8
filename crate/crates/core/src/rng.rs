//! Deterministic stream derivation for parallel Monte Carlo.
//!
//! Every trial draws from its own ChaCha stream whose seed is a hash of the
//! master seed and a list of integer tags (experiment id, grid cell, trial
//! index, ...). Workers can therefore run trials in any order and on any
//! number of threads without changing a single sampled byte.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; good 64-bit avalanche, stable across platforms.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash a master seed together with a list of stream tags.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut h = mix64(master ^ 0x9e37_79b9_7f4a_7c15);
    for &t in tags {
        h = mix64(h.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(t));
    }
    h
}

/// A ChaCha stream for the given (master seed, tags) pair.
pub fn stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}

/// Stream tags for the fixed top-level domains, so independent uses of the
/// same master seed never collide.
pub mod domain {
    pub const SAMPLE_MATRIX: u64 = 1;
    pub const ISOTROPY: u64 = 2;
    pub const MOMENT_SWEEP: u64 = 3;
    pub const SCALING: u64 = 4;
    pub const SQUARE_NORM: u64 = 5;
    pub const GENERAL_COV: u64 = 6;
    pub const COLORING: u64 = 7;
    pub const SPARSIFY: u64 = 8;
    pub const SUITE: u64 = 9;
    pub const POWER_ITERATION: u64 = 10;
    pub const NET: u64 = 11;
}
