//! Deterministic seed fan-out.
//!
//! A single master seed drives the whole suite. Each (module, trial) pair
//! gets its own ChaCha stream so trials can run in any order, or in
//! parallel, without perturbing each other's draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the module tag; stable across platforms.
fn tag_hash(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in tag.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// RNG for a (master seed, module tag, trial index) triple.
pub fn fanout(master: u64, module: &str, trial: u64) -> ChaCha8Rng {
    let mixed = master
        .rotate_left(17)
        .wrapping_add(tag_hash(module))
        .wrapping_add(trial.wrapping_mul(0x9e3779b97f4a7c15));
    ChaCha8Rng::seed_from_u64(mixed)
}
