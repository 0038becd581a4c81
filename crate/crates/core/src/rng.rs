//! Deterministic Gaussian noise source.
//!
//! Noisy generators must reproduce bit-for-bit from a seed across platforms
//! and std/no_std builds, so the whole chain is pinned here: a ChaCha12
//! stream keyed directly by the seed, uniform doubles from the top 53 bits
//! of each 64-bit draw, and a fixed Box-Muller transform.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;
// 2^-53; maps 53-bit integers into [0, 1).
const UNIT: f64 = 1.0 / 9007199254740992.0;

/// Seeded stream of standard normal variates.
///
/// The same seed yields the same sequence on every platform. Draws come in
/// Box-Muller pairs; the sine half is cached and returned on the next call.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    /// Keys the stream with `seed` in the first eight key bytes, little
    /// endian, remaining bytes zero.
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        GaussianSource {
            rng: ChaCha12Rng::from_seed(key),
            spare: None,
        }
    }

    /// Next standard normal variate.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // Shifted into (0, 1] so the logarithm stays finite.
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * UNIT;
        let u2 = (self.rng.next_u64() >> 11) as f64 * UNIT;
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = TWO_PI * u2;
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }
}
