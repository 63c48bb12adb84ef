//! Seed derivation and the generator used everywhere in the crate.
//!
//! Every random draw goes through [`Rng`], a ChaCha8 stream seeded from a
//! 64-bit value. Child seeds are derived by folding labels into the parent
//! with a SplitMix64 finalizer, so trial `t` of grid point `k` gets the same
//! stream regardless of how many trials or points the sweep has.

use rand::SeedableRng;

pub type Rng = rand_chacha::ChaCha8Rng;

/// Stream label for prior generation within a trial.
pub const PRIOR_STREAM: u64 = 0x0070_7269_6f72;
/// Stream label for infection sampling within a trial.
pub const TRUTH_STREAM: u64 = 0x0074_7275_7468;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and a path of labels.
pub fn derive_seed(parent: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(splitmix64(parent), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derivation_is_order_sensitive() {
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[0]), derive_seed(1, &[]));
        assert_eq!(derive_seed(9, &[4, 5]), derive_seed(9, &[4, 5]));
    }

    #[test]
    fn streams_replay() {
        let mut a = rng_from_seed(derive_seed(42, &[7]));
        let mut b = rng_from_seed(derive_seed(42, &[7]));
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
