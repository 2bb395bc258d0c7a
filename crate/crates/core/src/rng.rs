//! Seeded counter-based random number generator.
//!
//! Every stochastic operation in the workbench takes a `&mut WbRng` so that
//! experiments are bit-reproducible from a single 64-bit seed. The generator
//! is the SplitMix64 construction: a 64-bit counter advanced by a fixed odd
//! increment, hashed through an avalanching mixer. `split` derives an
//! independent child stream, which is how per-trial streams are produced.

use crate::Complex64;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone)]
pub struct WbRng {
    counter: u64,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl WbRng {
    pub fn seed(seed: u64) -> Self {
        WbRng { counter: seed }
    }

    /// Derives an independent child stream. The parent advances once, so
    /// successive splits yield distinct streams.
    pub fn split(&mut self) -> WbRng {
        let s = self.next_u64();
        WbRng {
            counter: mix(s ^ 0x55a4_6990_29c3_a2f1),
        }
    }

    /// Current counter value; recorded in transcripts so a run can be
    /// replayed from its stream.
    pub fn state(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(GOLDEN_GAMMA);
        mix(self.counter)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        // Desk-scale bounds are tiny; modulo bias is < bound / 2^64.
        (self.next_u64() % bound as u64) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn bit(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Standard normal via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        let mut u = self.uniform();
        if u <= 0.0 {
            u = f64::MIN_POSITIVE;
        }
        let v = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u));
        r * libm::cos(2.0 * core::f64::consts::PI * v)
    }

    /// Complex standard Gaussian (each component variance 1/2, so the
    /// modulus-squared has unit mean).
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let scale = core::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.standard_normal() * scale, self.standard_normal() * scale)
    }

    /// Samples an index from an explicit probability vector. The weights must
    /// sum to 1 within tolerance; the tail index absorbs rounding.
    pub fn sample_index(&mut self, probs: &[f64]) -> usize {
        debug_assert!(!probs.is_empty());
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let mut a = WbRng::seed(42);
        let mut b = WbRng::seed(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_streams_differ_from_parent() {
        let mut parent = WbRng::seed(7);
        let mut child = parent.split();
        let (a, b) = (parent.next_u64(), child.next_u64());
        assert_ne!(a, b);
    }

    #[test]
    fn uniform_mean_is_half() {
        let mut rng = WbRng::seed(1);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| rng.uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn normal_moments() {
        let mut rng = WbRng::seed(3);
        let n = 200_000;
        let samples: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }
}
