//! Deterministic sampling.
//!
//! All randomness in the workspace comes from Xoshiro256++ seeded through
//! SplitMix64 (`seed_from_u64`). Uniform reals are `(next_u64 >> 11) · 2⁻⁵³`
//! mapped affinely onto `[lo, hi)`, which is easy to reproduce in other
//! languages.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
pub use rand_xoshiro::Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Uniform sample on `[0, 1)` with 53 random bits.
pub fn unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// Uniform index in `0..n` (`n > 0`).
pub fn index(rng: &mut impl RngCore, n: usize) -> usize {
    ((unit(rng) * n as f64) as usize).min(n - 1)
}
