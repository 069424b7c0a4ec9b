//! Deterministic random number generation.
//!
//! Every random choice in this crate flows through ChaCha12, a counter-based
//! stream cipher with a fixed published specification, seeded from a
//! caller-supplied 64-bit seed. The same seed therefore reproduces the same
//! stream on every platform and in every run.
//!
//! Independent sub-streams (one per grid cell and repetition in a sweep, for
//! example) are derived with [`subseed`], which folds tag words through the
//! SplitMix64 finalizer.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator used throughout the crate.
pub type Generator = ChaCha12Rng;

/// Build the crate's generator from a 64-bit seed.
pub fn seeded(seed: u64) -> Generator {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Derive an independent sub-seed from `seed` and an ordered list of tag
/// words (for example `[m, repetition]`).
///
/// Each tag is mixed through the SplitMix64 finalizer before being folded
/// into the running state, so `subseed(s, &[1, 2])` and `subseed(s, &[2, 1])`
/// differ.
pub fn subseed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = seed;
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag));
    }
    state
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let mut ga = seeded(42);
        let mut gb = seeded(42);
        let a: Vec<u64> = (0..8).map(|_| ga.random()).collect();
        let b: Vec<u64> = (0..8).map(|_| gb.random()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn subseed_is_order_sensitive() {
        assert_ne!(subseed(7, &[1, 2]), subseed(7, &[2, 1]));
        assert_ne!(subseed(7, &[1]), subseed(8, &[1]));
        assert_eq!(subseed(7, &[3, 4]), subseed(7, &[3, 4]));
    }
}
