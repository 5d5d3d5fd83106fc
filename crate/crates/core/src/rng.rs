//! Seeded, platform-independent randomness.
//!
//! Every stochastic routine takes a 64-bit seed and derives child streams by
//! index with [`split`], so results never depend on evaluation order or on the
//! number of workers a caller uses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// A generator for `seed`.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for the stream addressed by `path` under `seed`.
///
/// Counter-based: `split(s, &[b, i, j])` is a pure function of its inputs.
pub fn split(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |acc, &i| {
        splitmix64(acc ^ splitmix64(i.wrapping_add(0xD1B5_4A32_D192_ED03)))
    })
}

/// Generator for the stream addressed by `path` under `seed`.
pub fn child(seed: u64, path: &[u64]) -> Rng {
    seeded(split(seed, path))
}
