//! 64-bit linear congruential generator used for reproducible sampling.
//!
//! `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2^64)`;
//! each draw returns the upper 32 bits of the new state.

pub const MULTIPLIER: u64 = 6364136223846793005;
pub const INCREMENT: u64 = 1442695040888963407;

#[derive(Clone, Debug)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    /// Generator for sample `index` of a run seeded with `seed`.
    pub fn for_sample(seed: u64, index: u64) -> Self {
        Lcg64::new(seed.wrapping_add(index))
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform integer in `0..n`, `1 <= n <= 2^32`, by multiply-shift.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n >= 1 && n <= 1 << 32, "range out of bounds");
        (self.next_u32() as u64 * n) >> 32
    }
}
