//! Reproducible uniform variates.
//!
//! Generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`). The 64-bit
//! seed is expanded to the 256-bit ChaCha key by `SeedableRng::seed_from_u64`
//! (a PCG32 stream). Sub-stream `i` selects ChaCha's 64-bit stream id `i`,
//! so sub-streams are independent of each other and of how work is split.
//! A variate is `(next_u64 >> 11) · 2^-53`, uniform on `[0, 1)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SeededStream {
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl Iterator for SeededStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_uniform())
    }
}
