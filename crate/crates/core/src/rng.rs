//! Seeded counter-based random streams.
//!
//! Every random object is drawn from a ChaCha8 stream keyed by `(seed, stream)`.
//! Sub-seeds for independent roles (left/right sketch, trial index) come from
//! [`derive_seed`], so parallel and serial execution see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_SPARSE_EMBEDDING: u64 = 1;
pub const STREAM_GAUSSIAN: u64 = 2;
pub const STREAM_LEVERAGE: u64 = 3;
pub const STREAM_SYNTHETIC: u64 = 4;
pub const STREAM_VERIFY: u64 = 5;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finaliser applied to `seed` combined with `tag`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
