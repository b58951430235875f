//! Seeded randomness with per-sample substreams.
//!
//! Ensembles derive one independent ChaCha12 stream per sample index from the
//! master seed, so parallel generation is reproducible regardless of
//! scheduling, and any single sample can be reconstructed from its own seed.

use num_complex::Complex64;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 finalizer; full-avalanche mixing of a 64-bit word.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the self-contained seed of sample `index` within the ensemble
/// keyed by `master_seed`.
pub fn substream_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Counter-based generator for a single sample or probe stream.
pub fn stream(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[inline]
fn unit_open_closed(r: &mut impl RngCore) -> f64 {
    // (0, 1]: 53 uniform bits, shifted away from zero.
    ((r.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

#[inline]
fn unit_closed_open(r: &mut impl RngCore) -> f64 {
    // [0, 1)
    (r.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Standard complex Gaussian with density `exp(-|z|^2)/pi`, i.e.
/// `E zeta = 0`, `E |zeta|^2 = 1`, independent N(0, 1/2) parts.
///
/// Uses the polar form `sqrt(-ln U) e^{2 pi i V}`; exactly two 64-bit draws
/// per variate, so substream alignment is static.
pub fn complex_std_gaussian(r: &mut impl RngCore) -> Complex64 {
    let radius = (-unit_open_closed(r).ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * unit_closed_open(r);
    Complex64::from_polar(radius, angle)
}

/// Real standard normal derived from one complex draw.
pub fn standard_normal(r: &mut impl RngCore) -> f64 {
    std::f64::consts::SQRT_2 * complex_std_gaussian(r).re
}

/// Pair of standard complex Gaussians with `E{z1 * conj(z2)} = rho`,
/// `rho` in `[0, 1]`.
pub fn correlated_pair(r: &mut impl RngCore, rho: f64) -> (Complex64, Complex64) {
    debug_assert!((0.0..=1.0).contains(&rho));
    let z1 = complex_std_gaussian(r);
    let w = complex_std_gaussian(r);
    let z2 = rho * z1 + (1.0 - rho * rho).sqrt() * w;
    (z1, z2)
}
