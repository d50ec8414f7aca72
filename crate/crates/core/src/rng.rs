//! Deterministic random streams.
//!
//! All randomness in the crate flows through [`SplitMix64`], a 64-bit
//! counter-based generator (Steele, Lea & Flood's SplitMix): the state walk is
//! a Weyl sequence with increment `0x9E3779B97F4A7C15` and each output is a
//! fixed finalizer hash of the counter. Normal variates use the Box–Muller
//! transform with two fresh uniforms per draw (no cached second sample), so a
//! stream's output depends only on the seed and the number of draws taken.
//!
//! Independent streams are carved out of a base seed with [`derive_seed`],
//! which folds a list of words (run index, attempt, stream tag, ...) through
//! the same finalizer. Records produced from derived streams are therefore
//! stable under any execution order or thread count.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: an invertible 64-bit hash with full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from `base` and an ordered word list.
///
/// The derivation is `s := mix64(base)`, then for each word at position `i`
/// (from zero): `s := mix64(s ^ mix64(word + (i + 1) * GOLDEN_GAMMA))`.
/// Word order matters, so `(run, attempt)` and `(attempt, run)` yield
/// unrelated streams.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    let mut s = mix64(base);
    for (i, &w) in words.iter().enumerate() {
        let salted = w.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN_GAMMA));
        s = mix64(s ^ mix64(salted));
    }
    s
}

/// Counter-based 64-bit generator; see the module docs for the contract.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in `[0, 1)` using the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform integer in `[0, bound)` by rejection.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let limit = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < limit {
                return x % bound;
            }
        }
    }

    /// Normal variate via Box–Muller (cosine branch), two uniforms per draw.
    pub fn next_normal(&mut self, mean: f64, sd: f64) -> f64 {
        // 1 - u in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        mean + sd * radius * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
