use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CycloNum, Rational};

/// Seeded source of small random integers for generic-point evaluation.
///
/// `derived(seed, i)` gives an independent stream per trial index, so parallel
/// trials draw the same points regardless of scheduling.
#[derive(Clone, Debug)]
pub struct ScalarRng {
    inner: ChaCha8Rng,
}

impl ScalarRng {
    pub fn new(seed: u64) -> ScalarRng {
        ScalarRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn derived(seed: u64, stream: u64) -> ScalarRng {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        ScalarRng { inner }
    }

    /// Uniform integer in `[-bound, bound]`.
    pub fn next_int(&mut self, bound: u64) -> i64 {
        let b = bound.min(i64::MAX as u64) as i64;
        self.inner.gen_range(-b..=b)
    }

    pub fn next_rational(&mut self, bound: u64) -> Rational {
        Rational::from_integer(BigInt::from(self.next_int(bound)))
    }

    /// Nonzero integer in `[-bound, bound]`.
    pub fn next_nonzero(&mut self, bound: u64) -> Rational {
        loop {
            let v = self.next_int(bound.max(1));
            if v != 0 {
                return Rational::from_integer(BigInt::from(v));
            }
        }
    }

    /// A random rational point with `n` coordinates.
    pub fn point(&mut self, n: usize, bound: u64) -> Vec<CycloNum> {
        (0..n)
            .map(|_| CycloNum::from(self.next_rational(bound)))
            .collect()
    }
}

/// First draw of the stream for `seed`, an integer in `[-bound, bound]`.
pub fn random_scalar(seed: u64, bound: u64) -> Rational {
    ScalarRng::new(seed).next_rational(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn same_seed_same_value() {
        assert_eq!(random_scalar(0, 1000), random_scalar(0, 1000));
    }

    #[test]
    fn draws_stay_in_range() {
        let mut rng = ScalarRng::new(7);
        for _ in 0..10_000 {
            let v = rng.next_int(1000);
            assert!((-1000..=1000).contains(&v));
        }
    }

    #[test]
    fn seeds_spread_out() {
        let vals: HashSet<Rational> = (0..100).map(|s| random_scalar(s, 1_000_000)).collect();
        assert!(vals.len() >= 95, "only {} distinct", vals.len());
    }

    #[test]
    fn derived_streams_differ() {
        let draw = |stream| {
            let mut r = ScalarRng::derived(1, stream);
            (0..8).map(|_| r.next_int(1 << 40)).collect::<Vec<_>>()
        };
        assert_eq!(draw(0), draw(0));
        assert_ne!(draw(0), draw(1));
    }
}
