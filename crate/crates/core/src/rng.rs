//! Seeded, portable randomness.
//!
//! All randomized routines use [`DetRng`] (ChaCha8) and derive per-stream
//! seeds with [`derive_seed`], a SplitMix64-style mixer, so a result depends
//! only on `(seed, stream index)` and never on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type DetRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable seed for sub-stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Stable seed for the `(a, b)` sub-stream of `seed`.
pub fn derive_seed2(seed: u64, a: u64, b: u64) -> u64 {
    derive_seed(derive_seed(seed, a), b)
}

pub fn rng_from(seed: u64) -> DetRng {
    DetRng::seed_from_u64(seed)
}

pub fn stream(seed: u64, index: u64) -> DetRng {
    rng_from(derive_seed(seed, index))
}
