//! Deterministic 64-bit random streams.
//!
//! All randomness in this crate comes from SplitMix64 streams keyed by a
//! seed plus structural coordinates (trial index, matrix entry, cluster
//! cell). Keyed derivation makes every stochastic result a pure function of
//! the seed, independent of evaluation order, so parallel and sequential
//! executions produce identical bits. The generator is frozen here rather
//! than pulled from a crate so outputs never drift with a dependency bump.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer (Steele, Lea & Flood). A bijection on `u64`.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream purpose tags, so draws for different roles never collide even for
/// equal coordinates.
pub mod tag {
    /// Cluster value draws during instance generation.
    pub const CLUSTER_VALUES: u64 = 1;
    /// Per-entry channel transitions and erasures.
    pub const TRANSMIT: u64 = 2;
    /// Per-cluster decoder tie-breaks.
    pub const TIE_BREAK: u64 = 3;
}

/// A sequential SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { state: seed }
    }

    /// Stream for a keyed sub-domain of `seed`. `tag` separates purposes,
    /// `i` and `j` separate structural coordinates (entry, cluster cell).
    pub fn keyed(seed: u64, tag: u64, i: u64, j: u64) -> Self {
        let mut k = seed;
        k = mix(k.wrapping_add(GOLDEN).wrapping_add(tag));
        k = mix(k.wrapping_add(GOLDEN).wrapping_add(i));
        k = mix(k.wrapping_add(GOLDEN).wrapping_add(j));
        Stream { state: k }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n` via a 128-bit multiply. The modulo bias is below
    /// `n / 2^64`, irrelevant for the small `n` used here.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// A fair coin.
    #[inline]
    pub fn next_bool(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
