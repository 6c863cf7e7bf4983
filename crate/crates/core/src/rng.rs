//! SplitMix64 streams keyed by `(seed, index)`.
//!
//! Every random draw in the crate is derived from a stream built with
//! [`SplitMix64::keyed`], so a trial or orbit step produces the same values
//! no matter which worker thread evaluates it or in which order.

use std::f64::consts::TAU;

use num_complex::Complex64;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for item `index` of the run seeded with `seed`.
    pub fn keyed(seed: u64, index: u64) -> Self {
        Self::new(mix64(seed ^ mix64(index.wrapping_add(GOLDEN_GAMMA))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn angle(&mut self) -> f64 {
        TAU * self.next_f64()
    }

    /// Area-uniform point in the disk of the given radius around `center`.
    pub fn in_disk(&mut self, center: Complex64, radius: f64) -> Complex64 {
        let r = radius * self.next_f64().sqrt();
        center + Complex64::from_polar(r, self.angle())
    }

    pub fn on_circle(&mut self, center: Complex64, radius: f64) -> Complex64 {
        center + Complex64::from_polar(radius, self.angle())
    }
}
