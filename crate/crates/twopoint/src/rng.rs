//! Minimal deterministic PRNG for seeded sweeps.
//!
//! SplitMix64 is used instead of an external RNG crate so that `--seed`
//! reproduces bit-identical sweeps regardless of dependency versions.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Three sorted draws from `[a, b]`, always an admissible node triple.
    pub fn sorted_triple(&mut self, a: f64, b: f64) -> (f64, f64, f64) {
        let mut v = [
            self.in_range(a, b),
            self.in_range(a, b),
            self.in_range(a, b),
        ];
        v.sort_by(|p, q| p.partial_cmp(q).unwrap());
        (v[0], v[1], v[2])
    }
}
