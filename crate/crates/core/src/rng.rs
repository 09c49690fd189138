//! Deterministic random streams.
//!
//! Every randomized object is drawn from a ChaCha8 stream addressed by
//! `(seed, cell, index)`. ChaCha is counter-based, so an instance can be
//! regenerated without replaying the ones before it, and parallel campaigns
//! see exactly the same numbers as serial ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for item `index` of group `cell`.
pub fn stream(seed: u64, cell: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed) ^ splitmix64(cell.wrapping_add(0x5851_F42D)));
    rng.set_stream(index);
    rng
}
