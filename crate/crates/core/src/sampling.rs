//! Deterministic random sampling of ball vectors.
//!
//! Every stream is keyed by `(seed, index)`, so sample `i` of a run is the
//! same no matter which thread draws it or in which order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ball::{BallParams, BallVector};

/// Default cap on sampled norms, as a fraction of `s`.
pub const DEFAULT_NORM_CAP: f64 = 0.95;

/// Norm band used by near-boundary suites, as fractions of `s`.
pub const NEAR_BOUNDARY_BAND: (f64, f64) = (0.99, 0.999_999);

/// A reproducible random source for a single sample index.
pub struct SampleRng(ChaCha8Rng);

impl SampleRng {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self(rng)
    }

    /// Stream for retry `attempt` of sample `index`.
    pub fn with_attempt(seed: u64, index: u64, attempt: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        rng.set_word_pos(u128::from(attempt) << 40);
        Self(rng)
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform direction on the unit sphere of `dim` dimensions.
    pub fn direction(&mut self, dim: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| self.0.sample(StandardNormal)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-12 {
                return v.into_iter().map(|x| x / n).collect();
            }
        }
    }

    /// Uniform point of the ball of radius `cap * s`.
    pub fn ball_vector(&mut self, params: BallParams, cap: f64) -> BallVector {
        let dim = params.dim();
        // exclusive of 0 so the radius never collapses exactly
        let u = 1.0 - self.uniform();
        let r = params.s() * cap * u.powf(1.0 / dim as f64);
        self.vector_with_norm(params, r)
    }

    /// Point with norm drawn uniformly from `[lo * s, hi * s]`.
    pub fn shell_vector(&mut self, params: BallParams, lo: f64, hi: f64) -> BallVector {
        let r = params.s() * self.uniform_in(lo, hi);
        self.vector_with_norm(params, r)
    }

    pub fn near_boundary_vector(&mut self, params: BallParams) -> BallVector {
        self.shell_vector(params, NEAR_BOUNDARY_BAND.0, NEAR_BOUNDARY_BAND.1)
    }

    fn vector_with_norm(&mut self, params: BallParams, r: f64) -> BallVector {
        let coords = self
            .direction(params.dim())
            .into_iter()
            .map(|x| x * r)
            .collect();
        BallVector::new(coords, params).expect("sampled norm is below s")
    }
}
