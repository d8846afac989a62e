//! Counter-based random streams.
//!
//! A stream is addressed by `(master_seed, index)`: the ChaCha key is derived
//! from the master seed and the 64-bit stream id selects an independent
//! keystream. Any worker can open any stream without touching the others, so
//! trial `i` sees the same numbers whatever the scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Complex;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(index);
        RngStream { inner }
    }

    /// Uniform integer in `0..n`.
    pub fn index_below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Draws `z ~ CN(0, 1)`: independent real and imaginary parts, each
/// `N(0, 1/2)`.
#[inline]
pub fn sample_standard_complex_gaussian(stream: &mut RngStream) -> Complex {
    let re: f64 = stream.sample(StandardNormal);
    let im: f64 = stream.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
