//! Acceptance suite: every criterion runs at full scale with its pinned
//! tolerance and seed, printing one verdict line. Run with
//! `cargo test -p gef --test acceptance -- --nocapture` to watch progress.

use std::sync::OnceLock;

use gef::verify::{run_criterion, Scale, VerifyContext, DEFAULT_MASTER_SEED};

fn ctx() -> &'static VerifyContext {
    static CTX: OnceLock<VerifyContext> = OnceLock::new();
    CTX.get_or_init(VerifyContext::default)
}

fn check(id: usize) {
    let outcome = run_criterion(ctx(), id, Scale::Full, DEFAULT_MASTER_SEED);
    println!("{}", outcome.line());
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn criterion_01_jensen_completeness() {
    check(1);
}

#[test]
fn criterion_02_first_intensity() {
    check(2);
}

#[test]
fn criterion_03_variance_vs_monte_carlo() {
    check(3);
}

#[test]
fn criterion_04_forrester_honner_smooth_asymptotics() {
    check(4);
}

#[test]
fn criterion_05_indicator_boundary_asymptotics() {
    check(5);
}

#[test]
fn criterion_06_spectral_density_properties() {
    check(6);
}

#[test]
fn criterion_07_laguerre_coefficients() {
    check(7);
}

#[test]
fn criterion_08_log_modulus_covariance() {
    check(8);
}

#[test]
fn criterion_09_pair_correlation() {
    check(9);
}

#[test]
fn criterion_10_asymptotic_normality() {
    check(10);
}

#[test]
fn criterion_11_abnormal_fluctuations() {
    check(11);
}

#[test]
fn criterion_12_log_minus_example() {
    check(12);
}

#[test]
fn criterion_13_almost_independence() {
    check(13);
}

#[test]
fn criterion_14_potential_variance() {
    check(14);
}

#[test]
fn criterion_15_thread_count_determinism() {
    check(15);
}
