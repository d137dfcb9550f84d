//! Derivation of per-component seeds from one top-level seed.

/// Stable component tags mixed into the top-level seed.
pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const SVD: u64 = 2;
    pub const SVD_USER: u64 = 3;
    pub const SVD_ITEM: u64 = 4;
    pub const SYNTH: u64 = 5;
}

/// splitmix64 finalizer over `seed` and `stream`.
pub fn derive(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
