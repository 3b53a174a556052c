//! Deterministic per-walker random streams.
//!
//! Each walker's generator is derived statelessly from
//! `(seed, stream id, walker id)` through the SplitMix64 finalizer, so
//! results never depend on scheduling or worker count. The generator family
//! is fixed: SplitMix64 (Steele, Lea & Flood), sequential increment of the
//! golden-gamma constant with the standard 64-bit avalanche.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A single walker's random stream.
#[derive(Debug, Clone)]
pub struct WalkerRng {
    state: u64,
}

impl WalkerRng {
    /// Stream positioned deterministically by `(seed, stream, walker)`.
    pub fn for_walker(seed: u64, stream: u32, walker: u64) -> Self {
        let s1 = mix64(seed ^ GOLDEN_GAMMA);
        let s2 = mix64(s1 ^ (stream as u64).wrapping_mul(0xA24B_AED4_963E_E407));
        let state = mix64(s2 ^ walker.wrapping_mul(0x9FB2_1C65_1E98_DF25));
        Self { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1], safe to pass through `ln`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial with success probability `p`.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
