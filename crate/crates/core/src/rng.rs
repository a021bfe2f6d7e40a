//! Counter-based pseudo-random generation (SplitMix64) with explicit
//! stream splitting.
//!
//! Every random quantity in this crate is drawn from a substream addressed
//! by `(seed, stream index)`. Substreams are statistically independent and
//! can be consumed in any order, so parallel generation yields the same
//! output as sequential generation.

/// SplitMix64 (Vigna). The state advances along a Weyl sequence and the
/// output is a bijective mix of the state, which makes the generator
/// counter-based: output `n` depends only on `seed + n * GAMMA`.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Substream `index` of the generator seeded with `seed`. The stream key
    /// is mixed twice so that (seed, index) pairs that differ in either
    /// component land in unrelated regions of the state space.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self {
            state: mix(seed
                ^ mix(index
                    .wrapping_mul(GAMMA)
                    .wrapping_add(0x1F83_D9AB_FB41_BD6B))),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform f64 in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64) / DEN
    }

    /// Uniform f64 in (0, 1]; safe as an argument to `ln` or a negative power.
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    /// Uniform f64 in [lo, hi).
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard exponential deviate.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.next_f64_open().ln()
    }

    /// Poisson deviate by accumulating exponential interarrival times.
    /// O(lambda) draws; exact for the desk-scale intensities used here.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        assert!(
            lambda.is_finite() && lambda >= 0.0,
            "lambda must be finite and nonnegative"
        );
        let mut count = 0u64;
        let mut acc = self.exponential();
        while acc <= lambda {
            count += 1;
            acc += self.exponential();
        }
        count
    }
}
