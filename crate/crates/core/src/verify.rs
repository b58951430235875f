//! The acceptance suite: every releasable claim of the toolkit as an
//! executable criterion with pinned tolerances and seeds.
//!
//! Each criterion is independent and reports a pass/fail verdict with a
//! human-readable detail line; `Scale::Smoke` shrinks ensembles for quick
//! wiring checks (statistical verdicts are only meaningful at full scale).

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::{
    laguerre_coefficient, laguerre_coefficient_oracle, log_modulus_covariance,
    pair_correlation_smooth, variance_from_pair_measure,
};
use crate::error::Result;
use crate::harness::{bootstrap_variance_se, log_minus_probe, summarize};
use crate::indep::{
    build_net, coupling_gram, empirical_decorrelation, gershgorin_margin, interaction_bound,
    interaction_sum, min_admissible_rho, Compact,
};
use crate::special::zeta;
use crate::testfn::TestFunction;
use crate::variance::{
    asymptotic_indicator, asymptotic_smooth, potential_variance_exact, spectral_density_m,
    variance_exact, M_RATIO_LOWER, M_RATIO_UPPER,
};

const PI: f64 = std::f64::consts::PI;

pub const DEFAULT_MASTER_SEED: u64 = 1729;
pub const CRITERIA_COUNT: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Full,
    Smoke,
}

impl Scale {
    fn ensemble(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Smoke => (full / 20).max(120),
        }
    }

    fn configs(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Smoke => (full / 10).max(3),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    /// Statistical criteria depend on seeded Monte Carlo; numerical ones are
    /// deterministic identities and tolerances.
    pub statistical: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} [{}] {} - {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn outcome(id: usize, name: &str, statistical: bool, pass: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        name: name.into(),
        pass,
        statistical,
        detail,
    }
}

fn fail_from_error(id: usize, name: &str, statistical: bool, err: crate::Error) -> CriterionOutcome {
    outcome(id, name, statistical, false, format!("error: {err}"))
}

/// Cache of per-sample statistic vectors shared between criteria that reuse
/// the same seeded ensemble.
#[derive(Default)]
pub struct VerifyContext {
    stats: Mutex<HashMap<(String, u64, usize, u64), std::sync::Arc<Vec<f64>>>>,
}

impl VerifyContext {
    fn statistics(
        &self,
        h: &TestFunction,
        big_r: f64,
        n: usize,
        seed: u64,
    ) -> Result<std::sync::Arc<Vec<f64>>> {
        let key = (h.name.clone(), big_r.to_bits(), n, seed);
        if let Some(hit) = self.stats.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let (values, _) = crate::harness::sample_statistics(h, big_r, n, seed)?;
        let arc = std::sync::Arc::new(values);
        self.stats.lock().unwrap().insert(key, arc.clone());
        Ok(arc)
    }
}

/// Runs one criterion (1-based id).
pub fn run_criterion(
    ctx: &VerifyContext,
    id: usize,
    scale: Scale,
    master_seed: u64,
) -> CriterionOutcome {
    match id {
        1 => criterion_jensen(scale, master_seed),
        2 => criterion_first_intensity(ctx, scale, master_seed),
        3 => criterion_variance_mc(ctx, scale, master_seed),
        4 => criterion_forrester_honner(),
        5 => criterion_indicator_asymptotics(),
        6 => criterion_spectral_density(),
        7 => criterion_laguerre(),
        8 => criterion_log_modulus_covariance(scale, master_seed),
        9 => criterion_pair_correlation(scale, master_seed),
        10 => criterion_clt(ctx, scale, master_seed),
        11 => criterion_abnormal(ctx, scale, master_seed),
        12 => criterion_log_minus(scale, master_seed),
        13 => criterion_almost_independence(scale, master_seed),
        14 => criterion_potential_variance(scale, master_seed),
        15 => criterion_determinism(master_seed),
        _ => outcome(id, "unknown", false, false, "no such criterion".into()),
    }
}

/// Runs the whole suite in order.
pub fn run_all(scale: Scale, master_seed: u64) -> Vec<CriterionOutcome> {
    let ctx = VerifyContext::default();
    (1..=CRITERIA_COUNT)
        .map(|id| run_criterion(&ctx, id, scale, master_seed))
        .collect()
}

fn criterion_jensen(scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "jensen completeness (sampler + zeros + quadrature)";
    let n = scale.ensemble(100).min(100);
    let big_r = 6.0;
    let valid = big_r * 1.03 + 0.65;
    let degree = match crate::sample::truncation_degree(valid, 1e-10) {
        Ok(d) => d,
        Err(e) => return fail_from_error(1, name, false, e),
    };
    use rayon::prelude::*;
    let worst = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = crate::sample::sample_gef(
                crate::rng::substream_seed(master_seed, 9_000_000 + i),
                degree,
                valid,
                1e-10,
            )?;
            crate::zeros::jensen_check(&s, big_r)
        })
        .try_reduce(|| 0.0f64, |a, b| Ok(a.max(b)));
    match worst {
        Ok(w) => outcome(
            1,
            name,
            false,
            w < 1e-6,
            format!("max |discrepancy| over {n} samples at R=6: {w:.3e} (tol 1e-6)"),
        ),
        Err(e) => fail_from_error(1, name, false, e),
    }
}

fn criterion_first_intensity(
    ctx: &VerifyContext,
    scale: Scale,
    master_seed: u64,
) -> CriterionOutcome {
    let name = "first intensity: mean count in disk radius 6 = 36";
    let n = scale.ensemble(2000);
    let h = TestFunction::indicator();
    match ctx.statistics(&h, 6.0, n, master_seed) {
        Ok(values) => {
            let n_eff = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n_eff;
            let var = values
                .iter()
                .map(|v| (v - mean) * (v - mean))
                .sum::<f64>()
                / (n_eff - 1.0);
            let se = (var / n_eff).sqrt();
            let pass = (mean - 36.0).abs() < 4.0 * se;
            outcome(
                2,
                name,
                true,
                pass,
                format!("mean {mean:.4} vs 36 (4 SE = {:.4})", 4.0 * se),
            )
        }
        Err(e) => fail_from_error(2, name, true, e),
    }
}

fn criterion_variance_mc(ctx: &VerifyContext, scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "Monte Carlo variance matches the spectral formula (indicator, R=6)";
    let n = scale.ensemble(2000);
    let h = TestFunction::indicator();
    let run = || -> Result<(f64, f64, f64)> {
        let values = ctx.statistics(&h, 6.0, n, master_seed)?;
        let exact = variance_exact(&h, 6.0, 1e-7)?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (values.len() as f64 - 1.0);
        let boot = bootstrap_variance_se(&values, crate::rng::substream_seed(master_seed, 555));
        Ok((var, exact, boot))
    };
    match run() {
        Ok((var, exact, boot)) => outcome(
            3,
            name,
            true,
            (var - exact).abs() < 3.0 * boot,
            format!("MC {var:.4} vs exact {exact:.4} (3 bootstrap SE = {:.4})", 3.0 * boot),
        ),
        Err(e) => fail_from_error(3, name, true, e),
    }
}

fn criterion_forrester_honner() -> CriterionOutcome {
    let name = "smooth asymptotics: V * 16 pi R^2 / (zeta(3) ||Delta h||^2) -> 1";
    let h = TestFunction::gauss_bump();
    let run = || -> Result<(Vec<f64>, bool)> {
        let mut ratios = Vec::new();
        for &r in &[8.0, 16.0, 32.0] {
            let v = variance_exact(&h, r, 1e-8)?;
            let a = asymptotic_smooth(&h, r)?;
            ratios.push(v / a);
        }
        let monotone = ratios[0] < ratios[1] && ratios[1] < ratios[2];
        Ok((ratios, monotone))
    };
    match run() {
        Ok((ratios, monotone)) => {
            let last = ratios[2];
            let pass = monotone && (0.9..=1.1).contains(&last);
            outcome(
                4,
                name,
                false,
                pass,
                format!("ratios at R=8,16,32: {ratios:.4?} (final in [0.9, 1.1], increasing)"),
            )
        }
        Err(e) => fail_from_error(4, name, false, e),
    }
}

fn criterion_indicator_asymptotics() -> CriterionOutcome {
    let name = "boundary asymptotics for the unit-disk indicator at R=64";
    let h = TestFunction::indicator();
    match variance_exact(&h, 64.0, 1e-7) {
        Ok(v) => {
            let a = asymptotic_indicator(2.0 * PI, 64.0);
            let rel = (v / a - 1.0).abs();
            outcome(
                5,
                name,
                false,
                rel < 0.1,
                format!("V = {v:.4}, prediction = {a:.4}, |ratio-1| = {rel:.4}"),
            )
        }
        Err(e) => fail_from_error(5, name, false, e),
    }
}

fn criterion_spectral_density() -> CriterionOutcome {
    let name = "spectral density M: origin, limit, and min(lam^4,1) envelope";
    let m0 = spectral_density_m(0.0, 1e-10);
    let m20 = spectral_density_m(20.0, 1e-10);
    let limit_dev = (m20 - 1.0 / PI).abs();
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max: f64 = 0.0;
    let grid = 240;
    for i in 0..=grid {
        let lam = 10f64.powf(-3.0 + 6.0 * i as f64 / grid as f64);
        let ratio = spectral_density_m(lam, 1e-10) / lam.powi(4).min(1.0);
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);
    }
    let pass = m0 == 0.0
        && limit_dev < 1e-3
        && ratio_min >= M_RATIO_LOWER
        && ratio_max <= M_RATIO_UPPER;
    outcome(
        6,
        name,
        false,
        pass,
        format!(
            "M(0)={m0}, |M(20)-1/pi|={limit_dev:.2e}, ratio range [{ratio_min:.4}, {ratio_max:.4}] within [{M_RATIO_LOWER}, {M_RATIO_UPPER}]"
        ),
    )
}

fn criterion_laguerre() -> CriterionOutcome {
    let name = "Laguerre coefficients: closed form vs quadrature oracle";
    let mut worst: f64 = 0.0;
    for alpha in 0..=10usize {
        match laguerre_coefficient_oracle(alpha) {
            Ok(o) => worst = worst.max((o - laguerre_coefficient(alpha)).abs()),
            Err(e) => return fail_from_error(7, name, false, e),
        }
    }
    let c0_dev = (laguerre_coefficient(0) + 0.5 * crate::special::EULER_GAMMA).abs();
    outcome(
        7,
        name,
        false,
        worst < 1e-8 && c0_dev < 1e-8,
        format!("max |closed - oracle| over alpha<=10: {worst:.2e}; |c0 + gamma/2| = {c0_dev:.2e}"),
    )
}

fn criterion_log_modulus_covariance(scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "log-modulus covariance: correlated-Gaussian MC vs Li2(rho^2)/4";
    let n = scale.ensemble(100_000);
    let mut detail = String::new();
    let mut pass = true;
    for (k, &rho) in [0.0, 0.5, 1.0].iter().enumerate() {
        let want = match log_modulus_covariance(rho) {
            Ok(w) => w,
            Err(e) => return fail_from_error(8, name, true, e),
        };
        match crate::harness::correlated_gaussian_covariance_probe(
            rho,
            n,
            crate::rng::substream_seed(master_seed, 8_800 + k as u64),
        ) {
            Ok((cov, se)) => {
                let ok = (cov - want).abs() <= 3.0 * se + 1e-12;
                pass &= ok;
                detail.push_str(&format!("rho={rho}: {cov:.5} vs {want:.5} (3SE {:.5}); ", 3.0 * se));
            }
            Err(e) => return fail_from_error(8, name, true, e),
        }
    }
    outcome(8, name, true, pass, detail)
}

/// Isotropic set covariance of a disk of radius `rr`: the lens area of two
/// copies at center distance `u`.
fn disk_set_covariance(rr: f64, u: f64) -> f64 {
    if u >= 2.0 * rr {
        0.0
    } else {
        2.0 * rr * rr * (u / (2.0 * rr)).acos() - 0.5 * u * (4.0 * rr * rr - u * u).sqrt()
    }
}

fn criterion_pair_correlation(scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "pair correlation: repulsion limit, histogram, variance reconciliation";
    let run = || -> Result<(bool, String)> {
        // (a) near-diagonal limit.
        let near = pair_correlation_smooth(0.05, 1e-12)?;
        let lim_dev = (near.smooth_density + 1.0 / (PI * PI)).abs();
        let mut pass = lim_dev < 1e-3;
        let mut detail = format!("|d(0.05)+1/pi^2| = {lim_dev:.2e}; ");

        // (b) pair-distance histogram over a seeded ensemble.
        let n = scale.ensemble(2000);
        let disk_r = 6.0;
        let valid = disk_r * 1.02 + 0.1;
        let degree = crate::sample::truncation_degree(valid, 1e-10)?;
        let edges: Vec<f64> = (0..=14).map(|i| 0.2 + 0.2 * i as f64).collect();
        use rayon::prelude::*;
        let per_sample: Vec<Result<Vec<f64>>> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let s = crate::sample::sample_gef(
                    crate::rng::substream_seed(master_seed, 7_000_000 + i),
                    degree,
                    valid,
                    1e-10,
                )?;
                let (zs, _) = crate::zeros::find_zeros_disk_nudged(
                    &s,
                    Complex64::ZERO,
                    disk_r,
                    crate::zeros::DEFAULT_RESIDUAL_TOL,
                )?;
                let mut counts = vec![0.0; edges.len() - 1];
                // Only pairs with both points in the reference disk radius 6;
                // the nudged extraction may hold a few extra boundary zeros.
                let inside: Vec<&Complex64> = zs
                    .zeros
                    .iter()
                    .filter(|a| a.norm() < disk_r)
                    .collect();
                for a in &inside {
                    for b in &inside {
                        if std::ptr::eq(*a, *b) {
                            continue;
                        }
                        let dist = (*a - *b).norm();
                        if dist >= edges[0] && dist < edges[edges.len() - 1] {
                            counts[((dist - edges[0]) / 0.2) as usize] += 1.0;
                        }
                    }
                }
                Ok(counts)
            })
            .collect();
        let mut ok_samples: Vec<Vec<f64>> = Vec::new();
        let mut failed = 0usize;
        for r in per_sample {
            match r {
                Ok(c) => ok_samples.push(c),
                Err(_) => failed += 1,
            }
        }
        if failed * 1000 > n {
            return Err(crate::Error::EnsembleAbort {
                failed,
                total: n,
                limit: n / 1000,
            });
        }
        let m = ok_samples.len() as f64;
        let mut hist_ok = true;
        let mut worst_sigma: f64 = 0.0;
        for bin in 0..edges.len() - 1 {
            let mean = ok_samples.iter().map(|c| c[bin]).sum::<f64>() / m;
            let var = ok_samples
                .iter()
                .map(|c| (c[bin] - mean) * (c[bin] - mean))
                .sum::<f64>()
                / (m - 1.0);
            let se = (var / m).sqrt();
            // Prediction: int_bin 2 pi u * lens(u) * (1/pi^2 + d(u)) du.
            let predicted = crate::quad::integrate_gl(
                |u| {
                    let rho2 = pair_correlation_smooth(u, 1e-10)
                        .map(|p| p.with_intensity)
                        .unwrap_or(1.0 / (PI * PI));
                    2.0 * PI * u * disk_set_covariance(disk_r, u) * rho2
                },
                edges[bin],
                edges[bin + 1],
                32,
            );
            let sigmas = (mean - predicted).abs() / se;
            worst_sigma = worst_sigma.max(sigmas);
            if sigmas >= 3.0 {
                hist_ok = false;
            }
        }
        pass &= hist_ok;
        detail.push_str(&format!("worst histogram deviation {worst_sigma:.2} SE over 14 bins; "));

        // (c) variance reconciliation between the two paper routes.
        let h = TestFunction::gauss_bump();
        let via_pairs = variance_from_pair_measure(&h, 4.0, 1e-6)?;
        let spectral = variance_exact(&h, 4.0, 1e-9)?;
        let rel = ((via_pairs - spectral) / spectral).abs();
        pass &= rel < 0.01;
        detail.push_str(&format!("pair-measure vs spectral variance: rel {rel:.4}"));
        Ok((pass, detail))
    };
    match run() {
        Ok((pass, detail)) => outcome(9, name, true, pass, detail),
        Err(e) => fail_from_error(9, name, true, e),
    }
}

fn criterion_clt(ctx: &VerifyContext, scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "asymptotic normality: smooth bump and cone(0.6) at R=16";
    let n = scale.ensemble(4000);
    let run = || -> Result<(bool, String)> {
        let mut pass = true;
        let mut detail = String::new();
        for h in [TestFunction::smooth_bump(), TestFunction::cone(0.6)?] {
            let sigma = variance_exact(&h, 16.0, 1e-7)?.sqrt();
            let seed = crate::rng::substream_seed(master_seed, 10_000_000);
            let values = ctx.statistics(&h, 16.0, n, seed)?;
            let summary = summarize(&h.name, 16.0, seed, values.to_vec(), 0, Some(sigma))?;
            let ok = summary.ks_p_value > 0.01
                && summary.skewness.abs() < 0.15
                && summary.excess_kurtosis.abs() < 0.3;
            pass &= ok;
            detail.push_str(&format!(
                "{}: p={:.3}, skew={:.3}, exkurt={:.3}; ",
                h.name, summary.ks_p_value, summary.skewness, summary.excess_kurtosis
            ));
        }
        // Exact-sigma slope for the cone: sigma ~ R^{1/2 - alpha} = R^{-0.1}.
        let cone = TestFunction::cone(0.6)?;
        let mut ln_r = Vec::new();
        let mut ln_sigma = Vec::new();
        for &r in &[8.0, 16.0, 32.0] {
            ln_r.push((r as f64).ln());
            ln_sigma.push(variance_exact(&cone, r, 1e-7)?.sqrt().ln());
        }
        let slope = {
            let n = ln_r.len() as f64;
            let mx = ln_r.iter().sum::<f64>() / n;
            let my = ln_sigma.iter().sum::<f64>() / n;
            let num: f64 = ln_r
                .iter()
                .zip(&ln_sigma)
                .map(|(x, y)| (x - mx) * (y - my))
                .sum();
            let den: f64 = ln_r.iter().map(|x| (x - mx) * (x - mx)).sum();
            num / den
        };
        pass &= (slope + 0.1).abs() < 0.05;
        detail.push_str(&format!("cone sigma slope {slope:.3} (want -0.1 +- 0.05)"));
        Ok((pass, detail))
    };
    match run() {
        Ok((pass, detail)) => outcome(10, name, true, pass, detail),
        Err(e) => fail_from_error(10, name, true, e),
    }
}

fn criterion_abnormal(ctx: &VerifyContext, scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "abnormal fluctuations of h_alpha (alpha = 0.5) vs smooth control";
    let n = scale.ensemble(4000);
    let run = || -> Result<(bool, String)> {
        let alpha = 0.5;
        let h = TestFunction::abnormal(alpha)?;
        let mut scaled = Vec::new();
        let mut p_large = 1.0;
        for &r in &[8.0f64, 16.0] {
            let seed = crate::rng::substream_seed(master_seed, 11_000_000);
            let values = ctx.statistics(&h, r, n, seed)?;
            let summary = summarize(&h.name, r, seed, values.to_vec(), 0, None)?;
            scaled.push(r.powf(alpha) * summary.variance.sqrt());
            if r == 16.0 {
                p_large = summary.ks_p_value;
            }
        }
        let stabilization = (scaled[1] / scaled[0] - 1.0).abs();
        // Control: identical pipeline (empirical standardization) on the
        // smooth bump must NOT reject normality.
        let control_seed = crate::rng::substream_seed(master_seed, 10_000_000);
        let control_values =
            ctx.statistics(&TestFunction::smooth_bump(), 16.0, n, control_seed)?;
        let control = summarize("smooth-bump", 16.0, control_seed, control_values.to_vec(), 0, None)?;
        let pass = stabilization < 0.2 && p_large < 0.01 && control.ks_p_value > 0.01;
        Ok((
            pass,
            format!(
                "R^a sigma at R=8,16: {:.4}, {:.4} (ratio dev {:.3}); KS p at R=16: {:.2e} (< 0.01); control p = {:.3} (> 0.01)",
                scaled[0], scaled[1], stabilization, p_large, control.ks_p_value
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => outcome(11, name, true, pass, detail),
        Err(e) => fail_from_error(11, name, true, e),
    }
}

fn criterion_log_minus(scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "log-minus example: mean R^2/2, circle-term decay, limit law";
    let n = scale.ensemble(2000);
    let run = || -> Result<(bool, String)> {
        let report = log_minus_probe(&[4.0, 8.0, 16.0], n, master_seed)?;
        // Mean at R = 6 with its own ensemble (the identity is per-R).
        let mean_rep = log_minus_probe(&[6.0], n, crate::rng::substream_seed(master_seed, 66))?;
        let row6 = &mean_rep.rows[0];
        let mean_ok = (row6.mean - 18.0).abs() < 4.0 * row6.mean_se;
        let decay = report.circle_variance_decay_exponent;
        let decay_ok = (decay + 1.0).abs() < 0.3;
        let ks_ok = report.ks_distance_to_reference < 0.05;
        Ok((
            mean_ok && decay_ok && ks_ok,
            format!(
                "mean at R=6: {:.3} vs 18 (4SE {:.3}); circle-variance decay exponent {:.3} (want -1 +- 0.3); KS to -(log|zeta|-b): {:.4} (< 0.05)",
                row6.mean,
                4.0 * row6.mean_se,
                decay,
                report.ks_distance_to_reference
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => outcome(12, name, true, pass, detail),
        Err(e) => fail_from_error(12, name, true, e),
    }
}

fn criterion_almost_independence(scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "almost independence: interaction bound, Gershgorin, decorrelation";
    let configs = scale.configs(50);
    let run = || -> Result<(bool, String)> {
        use rand::RngCore;
        let a_param = 5.0;
        let mut rng = crate::rng::stream(crate::rng::substream_seed(master_seed, 13_000));
        let mut unif = move || (rng.next_u64() >> 11) as f64 / 9_007_199_254_740_992.0;
        let mut worst_margin = f64::INFINITY;
        let mut bound_ok = true;
        for _ in 0..configs {
            let w1 = 0.5 + 2.5 * unif();
            let h1 = 0.5 + 2.5 * unif();
            let w2 = 0.5 + 2.5 * unif();
            let h2 = 0.5 + 2.5 * unif();
            let r1 = Compact::Rect {
                x0: 0.0,
                y0: 0.0,
                x1: w1,
                y1: h1,
            };
            let rho1 = min_admissible_rho(&r1) + unif();
            let r2_floor_rho = {
                let probe = Compact::Rect {
                    x0: 0.0,
                    y0: 0.0,
                    x1: w2,
                    y1: h2,
                };
                min_admissible_rho(&probe)
            };
            let rho2 = r2_floor_rho + unif();
            // Admissible placement: gap strictly above A(rho1 + rho2).
            let gap = a_param * (rho1 + rho2) * (1.05 + unif());
            let r2 = Compact::Rect {
                x0: w1 + gap,
                y0: 0.3 * unif(),
                x1: w1 + gap + w2,
                y1: 0.3 * unif() + h2,
            };
            let n1 = build_net(&r1, a_param, rho1, 0)?;
            let n2 = build_net(&r2, a_param, rho2, 1)?;
            let nets = vec![n1, n2];
            for net in &nets {
                let bound = interaction_bound(net);
                for z in &net.circle_points {
                    let s = interaction_sum(*z, net.compact_id, &nets)?;
                    if s >= bound {
                        bound_ok = false;
                    }
                }
            }
            worst_margin = worst_margin.min(gershgorin_margin(&coupling_gram(&nets)));
        }
        // Empirical decorrelation: side-2 squares separated by 8.
        let s1 = Compact::Rect {
            x0: -6.0,
            y0: -1.0,
            x1: -4.0,
            y1: 1.0,
        };
        let s2 = Compact::Rect {
            x0: 4.0,
            y0: -1.0,
            x1: 6.0,
            y1: 1.0,
        };
        let n = scale.ensemble(4000);
        let rep = empirical_decorrelation(
            &TestFunction::indicator(),
            &s1,
            &s2,
            1.0,
            n,
            crate::rng::substream_seed(master_seed, 13_001),
        )?;
        let corr_gate = 4.0 / (n as f64).sqrt();
        let pass = bound_ok && worst_margin > 0.0 && rep.correlation.abs() < corr_gate;
        Ok((
            pass,
            format!(
                "interaction bound held on {configs} configs: {bound_ok}; min Gershgorin margin {worst_margin:.3e}; |corr| = {:.4} (< {corr_gate:.4})",
                rep.correlation.abs()
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => outcome(13, name, true, pass, detail),
        Err(e) => fail_from_error(13, name, true, e),
    }
}

fn criterion_potential_variance(scale: Scale, master_seed: u64) -> CriterionOutcome {
    let name = "potential-integral variance: MC vs spectral; uniform L2 bound";
    let n = scale.ensemble(4000);
    let run = || -> Result<(bool, String)> {
        let g = TestFunction::indicator();
        let spectral = potential_variance_exact(&g)?;
        let valid = 1.02 * 1.013 + 0.55;
        let degree = crate::sample::truncation_degree(valid, 1e-10)?;
        use rayon::prelude::*;
        let raw: Vec<Result<f64>> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let s = crate::sample::sample_gef(
                    crate::rng::substream_seed(master_seed, 14_000_000 + i),
                    degree,
                    valid,
                    1e-10,
                )?;
                crate::zeros::potential_disk_integral(&s, 1.0)
            })
            .collect();
        let mut values = Vec::new();
        let mut failed = 0;
        for r in raw {
            match r {
                Ok(v) => values.push(v),
                Err(_) => failed += 1,
            }
        }
        if failed * 1000 > n {
            return Err(crate::Error::EnsembleAbort {
                failed,
                total: n,
                limit: n / 1000,
            });
        }
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let var = values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (m - 1.0);
        let boot = bootstrap_variance_se(&values, crate::rng::substream_seed(master_seed, 777));
        let mc_ok = (var - spectral).abs() < 3.0 * boot;
        // Uniform bound with the explicit constant (pi/4) zeta(3).
        let cap = 0.25 * PI * zeta(3.0);
        let mut bound_ok = true;
        for name in [
            "indicator",
            "gauss-bump",
            "cone:0.5",
            "smooth-bump",
            "log-minus",
            "abnormal:0.5",
        ] {
            let g = TestFunction::builtin(name)?;
            if potential_variance_exact(&g)? > cap * g.l2_norm * g.l2_norm * (1.0 + 1e-9) {
                bound_ok = false;
            }
        }
        Ok((
            mc_ok && bound_ok,
            format!(
                "MC var {var:.4} vs spectral {spectral:.4} (3 bootstrap SE {:.4}); (pi/4)zeta(3) bound on all built-ins: {bound_ok}",
                3.0 * boot
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => outcome(14, name, true, pass, detail),
        Err(e) => fail_from_error(14, name, true, e),
    }
}

/// Reduced but representative pipeline, serialized to bytes; criterion 15
/// compares runs under different thread counts. Determinism is a structural
/// property (per-index substreams, ordered reductions), so the reduced scale
/// proves the same invariant the full suite relies on.
pub fn pipeline_bytes(master_seed: u64, threads: usize) -> Result<Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
    pool.install(|| {
        let mut out = Vec::new();
        let h = TestFunction::indicator();
        let summary = crate::harness::run_ensemble(&h, 2.0, 150, master_seed, None)?;
        out.extend_from_slice(serde_json::to_string(&summary)?.as_bytes());
        let report = crate::variance::VarianceReport::build(&h, 4.0, 1e-7)?;
        out.extend_from_slice(report.csv_row().as_bytes());
        out.extend_from_slice(
            crate::correlation::pair_correlation_csv(&[0.5, 1.0, 2.0], 1e-10)?.as_bytes(),
        );
        let s = crate::sample::sample_gef_indexed(master_seed, 0, 4.0, 1e-10)?;
        let (zs, _) = crate::zeros::find_zeros_disk_nudged(
            &s,
            Complex64::ZERO,
            3.0,
            crate::zeros::DEFAULT_RESIDUAL_TOL,
        )?;
        let mut zeros_csv = Vec::new();
        crate::zeros::write_csv(&mut zeros_csv, &[(0, &zs)])?;
        out.extend_from_slice(&zeros_csv);
        let rep = empirical_decorrelation(
            &h,
            &Compact::Rect {
                x0: -4.0,
                y0: -1.0,
                x1: -2.0,
                y1: 1.0,
            },
            &Compact::Rect {
                x0: 2.0,
                y0: -1.0,
                x1: 4.0,
                y1: 1.0,
            },
            1.0,
            150,
            master_seed,
        )?;
        out.extend_from_slice(serde_json::to_string(&rep)?.as_bytes());
        Ok(out)
    })
}

fn criterion_determinism(master_seed: u64) -> CriterionOutcome {
    let name = "bit-identical outputs across thread counts";
    let run = || -> Result<(bool, String)> {
        let one = pipeline_bytes(master_seed, 1)?;
        let two = pipeline_bytes(master_seed, 2)?;
        let four = pipeline_bytes(master_seed, 4)?;
        let pass = one == two && two == four;
        Ok((
            pass,
            format!(
                "pipeline bytes ({}) identical across 1/2/4 threads: {pass}",
                one.len()
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => outcome(15, name, false, pass, detail),
        Err(e) => fail_from_error(15, name, false, e),
    }
}
