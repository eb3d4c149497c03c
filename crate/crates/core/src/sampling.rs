//! Seeded element samplers used by the empirical estimators and by
//! scenario domains.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::powi;
use crate::space::{norm, BasisSpec, Element, MetricKind, Tail};

/// Deterministic generator of random elements with up to `dim` stored
/// coefficients and, optionally, a geometric tail.
#[derive(Clone, Debug)]
pub struct ElementSampler {
    rng: ChaCha8Rng,
    dim: usize,
    tails: bool,
}

impl ElementSampler {
    /// Finitely supported samples of length `1..=dim`.
    pub fn new(seed: u64, dim: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim: dim.max(1),
            tails: false,
        }
    }

    /// Give half of the samples a geometric tail.
    pub fn with_tails(mut self, tails: bool) -> Self {
        self.tails = tails;
        self
    }

    /// Uniform scalar in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Uniform index in `1..=n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(1..=n.max(1))
    }

    /// Raw sample with coefficients in `[-1, 1)`.
    pub fn sample(&mut self) -> Element {
        let len = self.rng.gen_range(1..=self.dim);
        let coeffs: Vec<f64> = (0..len).map(|_| self.rng.gen_range(-1.0..1.0)).collect();
        let tail = if self.tails && self.rng.gen_bool(0.5) {
            let mag = self.rng.gen_range(0.2..0.8);
            let ratio = if self.rng.gen_bool(0.5) { mag } else { -mag };
            let first = self.rng.gen_range(-1.0..1.0);
            // first tail coefficient (index len + 1) equals first · ratio
            Tail::geometric(first / powi(ratio, len as u64), ratio).unwrap_or_default()
        } else {
            Tail::zero()
        };
        Element::new(coeffs, tail).unwrap_or_default()
    }

    /// Sample rescaled to a random norm in `[0, radius]`.
    pub fn sample_in_ball(
        &mut self,
        radius: f64,
        basis: &BasisSpec,
        metric: MetricKind,
    ) -> Element {
        let x = self.sample();
        let n = norm(&x, basis, metric);
        if n == 0.0 {
            return x;
        }
        let r = radius * self.rng.gen_range(0.0..=1.0);
        x.scale(r / n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let mut a = ElementSampler::new(42, 5).with_tails(true);
        let mut b = ElementSampler::new(42, 5).with_tails(true);
        for _ in 0..20 {
            assert_eq!(a.sample(), b.sample());
        }
    }

    #[test]
    fn ball_samples_respect_radius() {
        let mut s = ElementSampler::new(1, 6).with_tails(true);
        for _ in 0..100 {
            let x = s.sample_in_ball(0.5, &BasisSpec::Canonical, MetricKind::L2);
            assert!(norm(&x, &BasisSpec::Canonical, MetricKind::L2) <= 0.5 + 1e-12);
        }
    }
}
