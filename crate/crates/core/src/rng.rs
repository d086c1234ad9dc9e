//! Seeded random sources.
//!
//! Every stochastic routine in the crate draws from ChaCha8 (`rand_chacha`),
//! keyed by `ChaCha8Rng::seed_from_u64(seed)` and separated by stream id, so a
//! given seed never feeds two different consumers the same keystream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent keystreams for the different consumers of a user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Fgn = 0,
    Shuffle = 1,
}

pub fn seeded(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// SplitMix64 finaliser; used to derive fresh seeds from a base seed.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The `k`-th seed in the deterministic sequence rooted at `base`.
/// `derive_seed(base, 0) == base`.
pub fn derive_seed(base: u64, k: u64) -> u64 {
    if k == 0 {
        base
    } else {
        splitmix64(base ^ splitmix64(k))
    }
}
