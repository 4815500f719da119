//! Seeded random streams.
//!
//! Every stochastic step draws from its own ChaCha8 stream keyed by the run
//! seed and a path of integers (repetition, purpose, qubit, prepared state…),
//! so results do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for `seed` at `path`.
pub fn substream(seed: u64, path: &[u64]) -> StreamRng {
    let key = path.iter().fold(splitmix64(seed), |acc, &p| {
        splitmix64(acc ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)))
    });
    ChaCha8Rng::seed_from_u64(key)
}
