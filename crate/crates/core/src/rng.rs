//! Seeded random streams.
//!
//! Every random quantity in the toolkit is drawn from a `ChaCha8Rng` seeded
//! through [`derive_seed`], so a run is a pure function of its base seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags keep the random streams of one replicate apart.
pub mod stream {
    pub const TARGET_TRAIN: u64 = 1;
    pub const SOURCE_TRAIN: u64 = 2;
    pub const TEST: u64 = 3;
    pub const CV: u64 = 4;
    pub const RISK: u64 = 5;
    pub const AGREEMENT: u64 = 6;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `(base, index, tag)`: three chained SplitMix64 rounds.
pub fn derive_seed(base: u64, index: u64, tag: u64) -> u64 {
    let a = splitmix64(base);
    let b = splitmix64(a ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    splitmix64(b ^ tag.wrapping_mul(0xA24B_AED4_963E_E407))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
