//! Replication-indexed random streams.
//!
//! Replication `i` of a run seeded with `seed` always draws from ChaCha8
//! stream `i` of the key derived from `seed`, so results do not depend on
//! the order in which replications execute or on the number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::CompensatedSum;

/// Random stream of replication `index`.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Independent seed for a sub-experiment `tag` of a run (SplitMix64 mix).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `n_rep` replications, possibly in parallel, and returns their
/// results in replication order.
pub fn replicate<T, F>(seed: u64, n_rep: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..n_rep)
        .into_par_iter()
        .map(|i| f(i, &mut replication_rng(seed, i)))
        .collect()
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_rep: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Sample mean and `s/√n` of `samples`, summed in order.
    pub fn from_samples(samples: &[f64], seed: u64) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::InvalidInput("n_rep must be positive".into()));
        }
        let mean = samples.iter().copied().collect::<CompensatedSum>().value() / n as f64;
        let ss = samples
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .collect::<CompensatedSum>()
            .value();
        let var = if n > 1 { ss / (n - 1) as f64 } else { 0.0 };
        Ok(Self {
            value: mean,
            std_error: (var / n as f64).sqrt(),
            n_rep: n as u64,
            seed,
        })
    }

    /// Whether `target` lies within `k` standard errors.
    pub fn covers(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_order_independent() {
        let a: Vec<u64> = replicate(7, 64, |_, r| Ok(r.random())).unwrap();
        let b: Vec<u64> = (0..64).rev().map(|i| replication_rng(7, i).random()).collect();
        let b: Vec<u64> = b.into_iter().rev().collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }

    #[test]
    fn estimate_from_samples() {
        let e = McEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 0).unwrap();
        assert_eq!(e.value, 2.5);
        assert!((e.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(McEstimate::from_samples(&[], 0).is_err());
    }
}
