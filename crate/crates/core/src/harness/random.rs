//! Seeded initial data.
//!
//! The stream is SplitMix64 started at `seed`; each 64-bit output `x` maps to
//! `lo + (hi - lo) * (x >> 11) * 2^-53`. The mapping is part of the output
//! format: the same seed gives the same field on every platform.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub fn unit_stream(seed: u64) -> impl Iterator<Item = f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    std::iter::repeat_with(move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
}

/// `n` i.i.d. values, uniform in `[lo, hi)`.
pub fn uniform_values(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    unit_stream(seed)
        .take(n)
        .map(|s| lo + (hi - lo) * s)
        .collect()
}
