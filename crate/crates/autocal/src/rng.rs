//! Deterministic random streams for Monte Carlo work.
//!
//! Every randomized quantity in this crate is reproducible from a single
//! `u64` seed. The scheme: ChaCha8 keyed by the seed, with one independent
//! stream per work item (a Monte Carlo batch, a simulation replication), so
//! results never depend on how items are scheduled across threads. Seeds for
//! distinct purposes are derived from one root via a splitmix64 finalizer.
//!
//! The samplers are fixed algorithms, recorded in [`crate::RNG_SPEC`]:
//! open-interval uniforms from the top 53 bits, polar-method normals with
//! spare caching, and the Marsaglia-Tsang squeeze method for gamma variates.
//! Changing any of them changes published numbers; treat them as frozen.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a distinct purpose (tag) under one root seed.
pub fn derive_seed(root: u64, tag: u64) -> u64 {
    splitmix64(root ^ splitmix64(tag))
}

/// One independent substream of the generator keyed by `seed`.
pub struct RngStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { rng, spare: None }
    }

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    pub fn unit_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * 2f64.powi(-53)
    }

    /// Standard normal by the polar method; the paired variate is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.unit_open() - 1.0;
            let v = 2.0 * self.unit_open() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    /// Gamma variate with the given shape and rate (mean = shape/rate).
    pub fn gamma(&mut self, shape: f64, rate: f64) -> f64 {
        debug_assert!(shape > 0.0 && rate > 0.0);
        if shape < 1.0 {
            // Boost: draw at shape+1 and scale by U^(1/shape).
            let u = self.unit_open();
            return self.gamma(shape + 1.0, rate) * u.powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.unit_open();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v / rate;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v / rate;
            }
        }
    }

    /// Index drawn from the distribution whose cumulative probabilities are
    /// `cum` (nondecreasing, last entry 1 up to rounding).
    pub fn category(&mut self, cum: &[f64]) -> usize {
        debug_assert!(!cum.is_empty());
        let u = self.unit_open();
        cum.partition_point(|&c| c < u).min(cum.len() - 1)
    }
}
