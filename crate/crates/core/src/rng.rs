//! Seeded randomness.
//!
//! ChaCha8 everywhere so that a seed fully determines a run regardless of
//! platform. Normal sampling is Box-Muller rather than a distribution crate
//! to keep the stream stable across dependency upgrades.

use crate::numeric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn normal(rng: &mut SeededRng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    numeric::sqrt(-2.0 * numeric::ln(u1)) * numeric::cos(2.0 * core::f64::consts::PI * u2)
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T>(rng: &mut SeededRng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<f64> = {
            let mut r = seeded(7);
            (0..16).map(|_| normal(&mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = seeded(7);
            (0..16).map(|_| normal(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut r = seeded(1);
        let mut v: Vec<usize> = (0..100).collect();
        shuffle(&mut r, &mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        assert_ne!(v, (0..100).collect::<Vec<_>>());
    }
}
