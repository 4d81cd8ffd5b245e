//! Counter-based seed derivation so parallel work items draw from
//! independent, order-free random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base ⊕ hash(a, b)`.
#[inline]
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    base ^ splitmix64(splitmix64(a) ^ b.rotate_left(32))
}

pub fn stream(base: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, a, b))
}
