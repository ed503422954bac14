//! Counter-based splittable random number generator.
//!
//! The generator produces output `i` as a pure function of `(key, i)`, so any
//! substream can be regenerated independently: parallel consumers derive a
//! substream key from `(seed, stream)` and never share state. The mixing
//! function is the SplitMix64 finalizer over a Weyl sequence.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic counter-based generator.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    ctr: u64,
}

impl CounterRng {
    /// Generator for `(seed, stream)`; distinct streams give independent
    /// substreams of the same seed.
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix(seed.wrapping_add(GOLDEN))
            ^ mix(stream.wrapping_mul(GOLDEN) ^ 0x6A09_E667_F3BC_C909);
        CounterRng { key, ctr: 0 }
    }

    /// Generator seeded directly, stream = 0.
    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = mix(self
            .key
            .wrapping_add(self.ctr.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)));
        self.ctr += 1;
        v
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`.
    #[inline]
    pub fn next_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform draw in `[lo, hi)`.
    #[inline]
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard exponential variate.
    #[inline]
    pub fn next_exp(&mut self) -> f64 {
        -(1.0 - self.next_f64()).ln()
    }

    /// Uniform point on the probability simplex of dimension `k`.
    pub fn simplex(&mut self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; k];
        self.simplex_fill(&mut v);
        v
    }

    /// Fill `out` with a uniform point on the simplex (no allocation).
    pub fn simplex_fill(&mut self, out: &mut [f64]) {
        let mut s = 0.0;
        for x in out.iter_mut() {
            *x = self.next_exp();
            s += *x;
        }
        for x in out.iter_mut() {
            *x /= s;
        }
    }
}
