//! Seeding helpers.
//!
//! Every stochastic operation takes a plain `u64` seed and draws from its own
//! ChaCha8 stream, so passing the same seed to, say, degree sampling and to the
//! matching does not correlate them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers, one per consumer of randomness.
pub(crate) mod stream {
    pub const DEGREES: u64 = 1;
    pub const MATCHING: u64 = 2;
    pub const CLASSIFY: u64 = 3;
    pub const TAUTOLOGY: u64 = 4;
    pub const EXPLORE_FORWARD: u64 = 5;
    pub const EXPLORE_REVERSE: u64 = 6;
    pub const GALTON_WATSON: u64 = 7;
    pub const PAIRS: u64 = 8;
}

/// One SplitMix64 output step applied to `x`.
pub const fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `index` under `master`: `SplitMix64(master + index)`.
pub const fn replicate_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index))
}

/// Counter-based generator for `seed` on the given stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
