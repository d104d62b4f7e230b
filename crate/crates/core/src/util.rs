//! Execution helpers: data-parallel map with a sequential fallback, and a
//! small deterministic PRNG for sampled checks.

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is enabled.
///
/// Results are always returned in index order, so output is independent of
/// the worker count.
pub fn map_indexed<U: Send>(n: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(n, f)
    }
}

/// Sequential variant of [`map_indexed`], kept callable unconditionally so
/// benchmarks can compare both code paths.
pub fn map_indexed_seq<U>(n: usize, f: impl Fn(usize) -> U) -> Vec<U> {
    (0..n).map(f).collect()
}

/// SplitMix64: tiny deterministic generator for sampled property checks.
///
/// All randomized checks in this crate take an explicit seed so reruns and
/// reports are reproducible.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn usize_below(&mut self, bound: usize) -> usize {
        (self.below(bound as u64)) as usize
    }
}
