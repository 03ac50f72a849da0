//! Deterministic pseudo-randomness for integration tests.

/// SplitMix64: tiny, seedable, and stable across platforms.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    /// Uniform signed coefficient in `[-span, span]`.
    pub fn coeff(&mut self, span: i64) -> i64 {
        self.below((2 * span + 1) as u64) as i64 - span
    }
}
