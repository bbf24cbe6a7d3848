//! Named random substreams derived from a single experiment seed.
//!
//! Every source of randomness in the pipeline draws from a `ChaCha8` stream
//! keyed by `(seed, stage tag)` — or `(seed, stage tag, index)` for per-fold
//! and per-trial streams. Stages can therefore be re-run in isolation and
//! reproduce exactly what a full run would have done.
//!
//! Tags in use: `"split"`, `"cv"`, `"smote"`, `"search"`, `"model"`,
//! `"eval"`, `"params"`, `"synth"`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for the substream named `tag`.
pub fn substream(seed: u64, tag: &str) -> u64 {
    splitmix64(seed ^ fnv1a(tag))
}

/// Seed for the `i`-th member of the substream family named `tag`
/// (per-fold, per-trial, per-round streams).
pub fn substream_i(seed: u64, tag: &str, i: u64) -> u64 {
    splitmix64(substream(seed, tag) ^ splitmix64(i.wrapping_add(1)))
}

/// RNG over the substream named `tag`.
pub fn rng_for(seed: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream(seed, tag))
}

/// RNG over the `i`-th member of the substream family named `tag`.
pub fn rng_for_i(seed: u64, tag: &str, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_i(seed, tag, i))
}

/// RNG seeded directly (callers that already hold a derived stream seed).
pub fn rng_from(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream)
}
