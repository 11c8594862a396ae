//! Seeded randomness.
//!
//! All stochastic operations take an explicit [`SimRng`]. Scenario runners
//! derive independent generators from a master seed with [`derive_rng`]:
//! the master seed keys the ChaCha generator and `(tag, index)` selects its
//! 64-bit stream, so children never overlap and do not depend on the order
//! in which they are created.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent generator for stream `(tag, index)` under `master`.
pub fn derive_rng(master: u64, tag: u64, index: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(master);
    rng.set_stream(mix(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ mix(index)));
    rng
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
