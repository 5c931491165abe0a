//! Seeded random-number plumbing.
//!
//! Every chain run owns a private ChaCha stream, so runs are reproducible
//! bit-for-bit given the seed and independent across concurrent replications.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used for all stochastic code paths.
pub type ChainRng = ChaCha8Rng;

/// Root RNG for a run.
pub fn seeded(seed: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed)
}

/// Derive a substream seed (per replication, per chain) from a root seed.
/// SplitMix64 finalizer; stable across platforms.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One standard-normal draw (Box–Muller; consumes exactly two uniforms).
pub fn standard_normal(rng: &mut ChainRng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1], keeps the log finite
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
