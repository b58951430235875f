//! Simulation and verification toolkit for the planar Gaussian Entire Function
//!
//! The central object is the random entire function
//! `F(z) = sum_k zeta_k z^k / sqrt(k!)` with i.i.d. standard complex Gaussian
//! coefficients. Its zero set is a translation-invariant point process in the
//! plane. This crate samples truncated realizations, extracts and validates
//! their zeros, evaluates linear statistics of the zero process, computes the
//! exact spectral formula for their variance, and probes asymptotic normality
//! (and the known abnormal counterexamples) with seeded Monte Carlo ensembles.
//!
//! Everything downstream of a seed is deterministic: ensembles use per-sample
//! ChaCha substreams and fixed-order reductions, so results do not depend on
//! thread count.

pub mod correlation;
pub mod error;
pub mod harness;
pub mod indep;
pub mod kahan;
pub mod quad;
pub mod rng;
pub mod sample;
pub mod special;
pub mod testfn;
pub mod variance;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Expectation of `log|zeta|` for a standard complex Gaussian `zeta`,
/// equal to minus half of Euler's constant.
pub const LOG_ABS_GAUSSIAN_MEAN: f64 = -0.5 * special::EULER_GAMMA;
