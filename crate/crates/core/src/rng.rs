//! Seeded random streams.
//!
//! Every Monte Carlo trial owns an independent ChaCha8 stream. Child seeds are
//! derived from a master seed and a list of indices with a SplitMix64 chain:
//!
//! ```text
//! h = splitmix64(master)
//! for i in indices: h = splitmix64(h ^ splitmix64(i + 1))
//! ```
//!
//! so a trial seed only depends on its coordinates, never on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    indices.iter().fold(splitmix64(master), |h, &i| {
        splitmix64(h ^ splitmix64(i.wrapping_add(1)))
    })
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for a `(stream tag, seed)` pair, so that e.g. the signal and the
/// sampling mask of one trial never share random numbers.
pub fn stream(seed: u64, tag: u64) -> Rng {
    seeded(derive_seed(seed, &[tag]))
}
