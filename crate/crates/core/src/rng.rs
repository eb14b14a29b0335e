//! Seed handling. Every stochastic component takes an externally owned
//! generator; streams are derived from a master seed by fixed splitting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type GpRng = ChaCha8Rng;

/// Stream tag for fitness-case sampling.
pub const CASE_STREAM: u64 = 0x6361_7365_5f73_6564;
/// Stream tag for initialization, breeding, selection and Tarpeian marking.
pub const BREED_STREAM: u64 = 0x6272_6565_645f_7364;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed for `stream` from `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ stream)
}

pub fn rng_from_seed(seed: u64) -> GpRng {
    ChaCha8Rng::seed_from_u64(seed)
}
