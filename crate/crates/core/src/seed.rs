//! Derivation of independent random streams from a run seed.

/// Mixes a run seed with a stream tag and an index (SplitMix64 finalizer).
pub fn derive(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const ENV: u64 = 1;
pub const SCHEDULER: u64 = 2;
pub const EVAL_ENV: u64 = 3;
pub const INIT: u64 = 4;
pub const UPDATE: u64 = 5;
pub const ROLLOUT: u64 = 6;
