//! Deterministic per-trajectory random number streams.
//!
//! Every trajectory owns one [`RngStream`] keyed by `(master_seed,
//! stream_index)`: the master seed selects the ChaCha key and the index
//! selects the ChaCha stream, so distinct indices give independent sequences
//! and a fixed key replays the same sequence regardless of how many worker
//! threads are running.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic generator owned by a single trajectory (or resample run).
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        Self { inner }
    }

    /// One standard normal draw.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform index in `[0, n)`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

/// Derive an independent sub-seed for a labelled child computation (sweep
/// points, bisection probes, bootstrap resampling).
pub fn derive_seed(master_seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer over the combined key
    let mut z = master_seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
