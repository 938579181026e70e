//! Counter-based pseudorandom generator.
//!
//! Reproducibility is a hard requirement for every sampler in this crate:
//! reports must be byte-identical across runs, platforms, and thread counts.
//! The generator here is therefore a pure function of `(seed, counter)`: the
//! k-th output is the SplitMix64 finalizer applied to
//! `seed + (k + 1) * GAMMA`, with `GAMMA = 0x9E3779B97F4A7C15` (the 64-bit
//! golden ratio). No hidden state, no platform dependence, and any draw can
//! be recomputed in isolation.
//!
//! Independent streams (one per trial, per chain, per sweep row) come from
//! [`derive_seed`], which hashes a `(seed, stream)` pair into a fresh seed.
//! Deriving streams up front is what lets callers fan work out to threads and
//! still reduce to the exact result a serial loop would produce.

/// 64-bit golden ratio increment used by SplitMix64.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective avalanche mix on 64 bits.
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Child seed for stream `stream` of a root seed.
///
/// Defined as `mix64(seed ^ mix64(stream + 1))`, so distinct streams of the
/// same root, and the same stream of distinct roots, decorrelate. The
/// function is public and stable: callers may persist derived seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_add(1)))
}

/// Deterministic counter-based RNG. See the module docs for the contract.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    counter: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { seed, counter: 0 }
    }

    /// The seed this generator was constructed with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for an independent stream; `self` is not advanced.
    pub fn split(&self, stream: u64) -> SeededRng {
        SeededRng::new(derive_seed(self.seed, stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform draw strictly inside (0, 1).
    ///
    /// Uses the top 53 bits plus a half-ulp offset, so 0.0 and 1.0 are never
    /// returned and `ln(u)` is always finite.
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Bernoulli(p) draw; consumes exactly one counter step.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
