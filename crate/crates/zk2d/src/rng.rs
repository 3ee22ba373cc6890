//! Deterministic randomness: one named 64-bit seed expanded by a
//! counter-based stream generator, so trials are reproducible across
//! platforms and independent of thread scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream for a given `(seed, purpose, counter)` triple.
///
/// Distinct purposes get disjoint streams regardless of how many draws
/// each consumer makes.
pub fn stream(seed: u64, purpose: Purpose, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose as u64) << 56 | (counter & 0x00ff_ffff_ffff_ffff));
    rng
}

#[derive(Debug, Clone, Copy)]
#[repr(u8)]
pub enum Purpose {
    InitialData = 1,
    BlockTrial = 2,
    SmoothField = 3,
    MeasureSample = 4,
    Generic = 5,
}

/// Standard normal pair via Box-Muller; avoids a rand_distr dependency.
pub fn normal_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (-2.0 * u1.ln()).sqrt();
    (r * u2.cos(), r * u2.sin())
}
