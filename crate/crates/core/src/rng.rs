//! Seeded random source for generators and test sweeps.
//!
//! The stream is pcg32 (64-bit LCG state, XSH-RR output permutation) built as
//! `Pcg32::new(seed, 0xa02bdbf7bb3c0a7)`. Derived draws are defined here, not
//! by an external distribution crate, so any implementation can reproduce them:
//!
//! - integer in `[lo, hi]`: `lo + ((next_u32 as u64 * span) >> 32)` with `span = hi - lo + 1`;
//! - unit real in `[0, 1)`: `(next_u64 >> 11) * 2^-53`, where `next_u64` joins two
//!   `next_u32` draws low word first;
//! - permutation of `0..k`: Fisher-Yates from the top, swapping `i` with an integer in `[0, i]`.

use rand_core::Rng;
use rand_pcg::Pcg32;

/// Stream selector used for every generator.
pub const STREAM: u64 = 0x0a02_bdbf_7bb3_c0a7;

#[derive(Debug, Clone)]
pub struct BapRng(Pcg32);

impl BapRng {
    pub fn new(seed: u64) -> Self {
        BapRng(Pcg32::new(seed, STREAM))
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    pub fn next_u64(&mut self) -> u64 {
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        (hi << 32) | lo
    }

    /// Uniform integer in the closed range `[lo, hi]`. Panics when `lo > hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty integer range");
        let span = (hi - lo) as u64 + 1;
        if span > u64::from(u32::MAX) {
            return lo + (self.next_u64() % span) as i64;
        }
        lo + ((u64::from(self.next_u32()) * span) >> 32) as i64
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.int_in(0, len as i64 - 1) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn permutation(&mut self, k: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            let j = self.int_in(0, i as i64) as usize;
            p.swap(i, j);
        }
        p
    }
}
