//! Seed derivation for the independent random streams of a run.
//!
//! Every stochastic stage (candidate sampling, user sampling, pair sampling,
//! corpus generation) draws from its own `ChaCha8Rng`, seeded from the master
//! seed and a stream label. Adding a new stream never perturbs existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed for the stream named `label`.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    // FNV-1a over the label, then mixed with the master seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(master ^ splitmix64(h))
}

pub fn rng_for(master: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label))
}
