//! Seeded Monte Carlo ensembles of linear statistics: normality testing,
//! abnormality probes, and the unbounded log-minus example.
//!
//! Determinism contract: every ensemble draws sample `i` from the substream
//! keyed by `(master_seed, i)`, collects per-index values in order, and
//! reduces sequentially, so results are bit-identical across thread counts.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::sample::{sample_gef, truncation_degree};
use crate::special::{gamma, kolmogorov_sf, normal_cdf};
use crate::testfn::TestFunction;
use crate::zeros::{find_zeros_disk_nudged, linear_statistic, DEFAULT_RESIDUAL_TOL};
use crate::LOG_ABS_GAUSSIAN_MEAN;

/// Margin added to `R * support_radius` when sizing extraction disks, on
/// top of the 2% relative slack consumed by guard-band nudges.
pub const EXTRACTION_MARGIN: f64 = 0.5;
const TAIL_TOL: f64 = 1e-10;

/// Summary statistics of one seeded ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub statistic_name: String,
    pub r: f64,
    pub n_samples: usize,
    pub failed_samples: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// `(x - mean)/sd`: empirical mean 0 and variance 1 by construction.
    pub standardized_samples: Vec<f64>,
    /// KS test of the sigma-policy standardization (see `sigma_used`).
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    /// Standard deviation used for the KS standardization: the spectral
    /// sigma when supplied (sharper shape test), else the sample one.
    pub sigma_used: f64,
    pub master_seed: u64,
}

fn moments(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<KahanSum>().value() / n;
    let mut m2 = KahanSum::new();
    let mut m3 = KahanSum::new();
    let mut m4 = KahanSum::new();
    for &x in values {
        let d = x - mean;
        m2.add(d * d);
        m3.add(d * d * d);
        m4.add(d * d * d * d);
    }
    let m2 = m2.value() / n;
    let m3 = m3.value() / n;
    let m4 = m4.value() / n;
    let variance = m2 * n / (n - 1.0);
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    (mean, variance, skewness, excess_kurtosis)
}

/// Assembles an `EnsembleSummary` from raw per-sample values.
pub fn summarize(
    statistic_name: &str,
    r: f64,
    master_seed: u64,
    values: Vec<f64>,
    failed_samples: usize,
    sigma_override: Option<f64>,
) -> Result<EnsembleSummary> {
    if values.len() < 100 {
        return Err(Error::TooFewSamples {
            n: values.len(),
            min: 100,
        });
    }
    let (mean, variance, skewness, excess_kurtosis) = moments(&values);
    let sd = variance.sqrt();
    let standardized_samples: Vec<f64> = values.iter().map(|&x| (x - mean) / sd).collect();
    let sigma_used = sigma_override.unwrap_or(sd);
    let ks_input: Vec<f64> = values.iter().map(|&x| (x - mean) / sigma_used).collect();
    let (ks_statistic, ks_p_value) = ks_normality(&ks_input)?;
    Ok(EnsembleSummary {
        statistic_name: statistic_name.into(),
        r,
        n_samples: values.len(),
        failed_samples,
        mean,
        variance,
        skewness,
        excess_kurtosis,
        standardized_samples,
        ks_statistic,
        ks_p_value,
        sigma_used,
        master_seed,
    })
}

/// Per-sample linear statistics `n(R, h)` over a seeded ensemble.
///
/// Extraction failures abort the sample; the run fails when more than 0.1%
/// of samples abort.
pub fn sample_statistics(
    h: &TestFunction,
    big_r: f64,
    n_samples: usize,
    master_seed: u64,
) -> Result<(Vec<f64>, usize)> {
    if h.l1_norm == 0.0 {
        return Err(Error::InvalidParameter(
            "test function is identically zero".into(),
        ));
    }
    let extraction = big_r * h.support_radius + EXTRACTION_MARGIN;
    let valid = extraction * 1.02 + 0.05;
    let degree = truncation_degree(valid, TAIL_TOL)?;
    let raw: Vec<Result<f64>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_gef(
                crate::rng::substream_seed(master_seed, i),
                degree,
                valid,
                TAIL_TOL,
            )?;
            let (zs, _) =
                find_zeros_disk_nudged(&s, Complex64::ZERO, extraction, DEFAULT_RESIDUAL_TOL)?;
            linear_statistic(&zs, h, big_r)
        })
        .collect();
    let mut values = Vec::with_capacity(n_samples);
    let mut failed = 0usize;
    for r in raw {
        match r {
            Ok(v) => values.push(v),
            Err(_) => failed += 1,
        }
    }
    if failed * 1000 > n_samples {
        return Err(Error::EnsembleAbort {
            failed,
            total: n_samples,
            limit: n_samples / 1000,
        });
    }
    Ok((values, failed))
}

/// Runs a seeded ensemble of linear statistics and summarizes it.
///
/// `sigma_override` feeds the KS standardization (typically the spectral
/// standard deviation, which isolates distributional shape).
pub fn run_ensemble(
    h: &TestFunction,
    big_r: f64,
    n_samples: usize,
    master_seed: u64,
    sigma_override: Option<f64>,
) -> Result<EnsembleSummary> {
    if n_samples < 100 {
        return Err(Error::TooFewSamples {
            n: n_samples,
            min: 100,
        });
    }
    let (values, failed) = sample_statistics(h, big_r, n_samples, master_seed)?;
    summarize(&h.name, big_r, master_seed, values, failed, sigma_override)
}

/// One-sample Kolmogorov-Smirnov test against the standard normal law.
///
/// Asymptotic p-value `P(sup |B| > sqrt(n) D)`; accurate for `n >= 100`
/// (enforced).
pub fn ks_normality(standardized: &[f64]) -> Result<(f64, f64)> {
    let n = standardized.len();
    if n < 100 {
        return Err(Error::TooFewSamples { n, min: 100 });
    }
    let mut xs = standardized.to_vec();
    xs.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = normal_cdf(x);
        d = d.max(((i + 1) as f64 / nf - cdf).abs());
        d = d.max((cdf - i as f64 / nf).abs());
    }
    Ok((d, kolmogorov_sf(nf.sqrt() * d)))
}

/// Bootstrap standard error of the sample variance (seeded, 1000
/// resamples); variance-of-variance needs fourth moments, so resampling is
/// the honest route.
pub fn bootstrap_variance_se(values: &[f64], seed: u64) -> f64 {
    use rand::RngCore;
    let n = values.len();
    let resamples = 1000;
    let mut rng = crate::rng::stream(seed);
    let mut vars = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut acc = KahanSum::new();
        let mut acc2 = KahanSum::new();
        for _ in 0..n {
            let idx = (rng.next_u64() % n as u64) as usize;
            acc.add(values[idx]);
            acc2.add(values[idx] * values[idx]);
        }
        let mean = acc.value() / n as f64;
        vars.push((acc2.value() / n as f64 - mean * mean) * n as f64 / (n as f64 - 1.0));
    }
    let (_, var_of_var, _, _) = moments(&vars);
    var_of_var.sqrt()
}

/// One row of a normality-probe verdict table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CltRow {
    pub r: f64,
    pub sigma_exact: f64,
    pub sigma_mc: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Hypothesis diagnostic `R^alpha sigma(R, h)` when the Holder exponent
    /// is known.
    pub hypothesis_diagnostic: Option<f64>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CltReport {
    pub test_function: String,
    pub rows: Vec<CltRow>,
    /// Least-squares slope of `ln sigma_exact` against `ln R`.
    pub sigma_slope: f64,
    pub master_seed: u64,
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Normality probe across scales: per `R`, the ensemble is standardized
/// with the spectral sigma and tested for Gaussian shape.
pub fn clt_probe(
    h: &TestFunction,
    r_list: &[f64],
    n_samples: usize,
    master_seed: u64,
) -> Result<CltReport> {
    let mut rows = Vec::new();
    let mut ln_r = Vec::new();
    let mut ln_sigma = Vec::new();
    for (idx, &r) in r_list.iter().enumerate() {
        let sigma_exact = crate::variance::variance_exact(h, r, 1e-7)?.sqrt();
        let seed = crate::rng::substream_seed(master_seed, 1_000_000 + idx as u64);
        let summary = run_ensemble(h, r, n_samples, seed, Some(sigma_exact))?;
        ln_r.push(r.ln());
        ln_sigma.push(sigma_exact.ln());
        rows.push(CltRow {
            r,
            sigma_exact,
            sigma_mc: summary.variance.sqrt(),
            ks_statistic: summary.ks_statistic,
            ks_p_value: summary.ks_p_value,
            skewness: summary.skewness,
            excess_kurtosis: summary.excess_kurtosis,
            hypothesis_diagnostic: h.holder_exponent.map(|a| r.powf(a) * sigma_exact),
            n_samples: summary.n_samples,
        });
    }
    Ok(CltReport {
        test_function: h.name.clone(),
        sigma_slope: fit_slope(&ln_r, &ln_sigma),
        rows,
        master_seed,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbnormalRow {
    pub r: f64,
    pub sigma_mc: f64,
    /// `R^alpha sigma_MC(R)`; stabilizes when the limit random variable
    /// takes over.
    pub scaled_sigma: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbnormalReport {
    pub alpha: f64,
    pub rows: Vec<AbnormalRow>,
    pub master_seed: u64,
}

/// Abnormality probe for `h_alpha = |x|^alpha psi(x)`: tracks the scaled
/// sigma `R^alpha sigma_MC` and tests the standardized statistic for
/// non-Gaussian shape (empirical standardization on both sides keeps the
/// pipeline symmetric with the smooth control).
pub fn abnormal_probe(
    alpha: f64,
    r_list: &[f64],
    n_samples: usize,
    master_seed: u64,
) -> Result<AbnormalReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "abnormal exponent must lie in (0,1), got {alpha}"
        )));
    }
    let h = TestFunction::abnormal(alpha)?;
    let mut rows = Vec::new();
    for (idx, &r) in r_list.iter().enumerate() {
        let seed = crate::rng::substream_seed(master_seed, 2_000_000 + idx as u64);
        let summary = run_ensemble(&h, r, n_samples, seed, None)?;
        let sigma_mc = summary.variance.sqrt();
        rows.push(AbnormalRow {
            r,
            sigma_mc,
            scaled_sigma: r.powf(alpha) * sigma_mc,
            ks_statistic: summary.ks_statistic,
            ks_p_value: summary.ks_p_value,
            skewness: summary.skewness,
            excess_kurtosis: summary.excess_kurtosis,
            n_samples: summary.n_samples,
        });
    }
    Ok(AbnormalReport {
        alpha,
        rows,
        master_seed,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogMinusRow {
    pub r: f64,
    /// Ensemble mean of `n(R, log^-)`; the exact mean is `R^2/2`.
    pub mean: f64,
    pub mean_se: f64,
    /// Variance of the circle-average term of the Jensen decomposition.
    pub circle_term_variance: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogMinusReport {
    pub rows: Vec<LogMinusRow>,
    /// Fitted exponent of `Var(circle term) ~ R^p` (predicted `p = -1`).
    pub circle_variance_decay_exponent: f64,
    /// Two-sample KS distance between the standardized centered statistic at
    /// the largest scale and a standardized `-(log|zeta| - b)` reference.
    pub ks_distance_to_reference: f64,
    pub master_seed: u64,
}

/// Per-sample data for the unbounded example `h = log^-`: both sides of the
/// Jensen decomposition.
fn log_minus_samples(
    big_r: f64,
    n_samples: usize,
    master_seed: u64,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let valid = big_r * 1.03 + 0.65;
    let degree = truncation_degree(valid, TAIL_TOL)?;
    let raw: Vec<Result<(f64, f64)>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_gef(
                crate::rng::substream_seed(master_seed, i),
                degree,
                valid,
                TAIL_TOL,
            )?;
            let d = crate::zeros::jensen_data(&s, big_r)?;
            // Linear statistic of log^- at the (nudged) radius, and the
            // circle-average fluctuation term.
            Ok((d.log_sum, d.avg_log_star - LOG_ABS_GAUSSIAN_MEAN))
        })
        .collect();
    let mut stats = Vec::with_capacity(n_samples);
    let mut circle = Vec::with_capacity(n_samples);
    let mut failed = 0usize;
    for r in raw {
        match r {
            Ok((a, b)) => {
                stats.push(a);
                circle.push(b);
            }
            Err(_) => failed += 1,
        }
    }
    if failed * 1000 > n_samples {
        return Err(Error::EnsembleAbort {
            failed,
            total: n_samples,
            limit: n_samples / 1000,
        });
    }
    Ok((stats, circle, failed))
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / xs.len() as f64 - j as f64 / ys.len() as f64).abs());
    }
    d
}

fn standardize(values: &[f64]) -> Vec<f64> {
    let (mean, var, _, _) = moments(values);
    let sd = var.sqrt();
    values.iter().map(|&x| (x - mean) / sd).collect()
}

/// Probe of the `log^-` example: mean `R^2/2`, `O(1/R)` decay of the
/// circle-term variance, and distributional match of the centered statistic
/// to `-(log|zeta| - b)` at the largest scale.
pub fn log_minus_probe(
    r_list: &[f64],
    n_samples: usize,
    master_seed: u64,
) -> Result<LogMinusReport> {
    let mut rows = Vec::new();
    let mut ln_r = Vec::new();
    let mut ln_var = Vec::new();
    let mut last_stats: Vec<f64> = Vec::new();
    for (idx, &r) in r_list.iter().enumerate() {
        let seed = crate::rng::substream_seed(master_seed, 3_000_000 + idx as u64);
        let (stats, circle, _failed) = log_minus_samples(r, n_samples, seed)?;
        let (mean, var, _, _) = moments(&stats);
        let (_, cvar, _, _) = moments(&circle);
        rows.push(LogMinusRow {
            r,
            mean,
            mean_se: (var / stats.len() as f64).sqrt(),
            circle_term_variance: cvar,
            n_samples: stats.len(),
        });
        ln_r.push(r.ln());
        ln_var.push(cvar.ln());
        last_stats = stats;
    }
    // Reference sample: -(log|zeta| - b) for standard complex Gaussians.
    let mut rng = crate::rng::stream(crate::rng::substream_seed(master_seed, 4_000_000));
    let reference: Vec<f64> = (0..last_stats.len())
        .map(|_| -(crate::rng::complex_std_gaussian(&mut rng).norm().ln() - LOG_ABS_GAUSSIAN_MEAN))
        .collect();
    let ks = ks_two_sample(&standardize(&last_stats), &standardize(&reference));
    Ok(LogMinusReport {
        circle_variance_decay_exponent: fit_slope(&ln_r, &ln_var),
        ks_distance_to_reference: ks,
        rows,
        master_seed,
    })
}

/// Empirical `Cov(log|z1|, log|z2|)` for correlated standard complex
/// Gaussians, with its standard error.
pub fn correlated_gaussian_covariance_probe(
    rho: f64,
    n_samples: usize,
    master_seed: u64,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "correlation must lie in [0,1], got {rho}"
        )));
    }
    let mut rng = crate::rng::stream(master_seed);
    let mut xs = Vec::with_capacity(n_samples);
    let mut ys = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let (z1, z2) = crate::rng::correlated_pair(&mut rng, rho);
        xs.push(z1.norm().ln());
        ys.push(z2.norm().ln());
    }
    let (mx, _, _, _) = moments(&xs);
    let (my, _, _, _) = moments(&ys);
    let products: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let (cov, var_prod, _, _) = moments(&products);
    Ok((cov, (var_prod / n_samples as f64).sqrt()))
}

/// Empirical `E |zeta|^t` against `Gamma(t/2 + 1)`, with standard error.
pub fn gamma_moment_probe(t: f64, n_samples: usize, master_seed: u64) -> Result<(f64, f64, f64)> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "moment order must be nonnegative, got {t}"
        )));
    }
    let mut rng = crate::rng::stream(master_seed);
    let values: Vec<f64> = (0..n_samples)
        .map(|_| crate::rng::complex_std_gaussian(&mut rng).norm().powf(t))
        .collect();
    let (mean, var, _, _) = moments(&values);
    Ok((
        mean,
        (var / n_samples as f64).sqrt(),
        gamma(0.5 * t + 1.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_exact_normal_grid() {
        // Deterministic normal quantiles: statistic ~ 0, p ~ 1.
        let n = 2000;
        let xs: Vec<f64> = (1..=n)
            .map(|i| {
                let p = (i as f64 - 0.5) / n as f64;
                // crude quantile via bisection on the cdf
                let (mut lo, mut hi) = (-9.0, 9.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let (d, p) = ks_normality(&xs).unwrap();
        assert!(d < 0.01, "d = {d}");
        assert!(p > 0.99, "p = {p}");
    }

    #[test]
    fn ks_degenerate_sample_rejected() {
        let xs = vec![0.3; 500];
        let (d, p) = ks_normality(&xs).unwrap();
        assert!(d >= 0.5, "d = {d}");
        assert!(p < 1e-6, "p = {p}");
        assert!(matches!(
            ks_normality(&[0.0; 50]),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn ks_seeded_normal_input() {
        // Frozen regression: a genuine normal sample must not be rejected.
        let mut rng = crate::rng::stream(2718);
        let xs: Vec<f64> = (0..4000)
            .map(|_| crate::rng::standard_normal(&mut rng))
            .collect();
        let (_, p) = ks_normality(&xs).unwrap();
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn moments_of_standardized_samples() {
        let mut rng = crate::rng::stream(5);
        let values: Vec<f64> = (0..3000)
            .map(|_| 3.0 + 2.0 * crate::rng::standard_normal(&mut rng))
            .collect();
        let s = summarize("x", 1.0, 5, values, 0, None).unwrap();
        let (m, v, _, _) = moments(&s.standardized_samples);
        assert!(m.abs() < 1e-12);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_moments() {
        let (m0, _, g0) = gamma_moment_probe(0.0, 1000, 1).unwrap();
        assert_eq!(m0, 1.0);
        assert_eq!(g0, 1.0);
        for &(t, want) in &[(2.0, 1.0), (4.0, 2.0)] {
            let (mean, se, g) = gamma_moment_probe(t, 200_000, 42).unwrap();
            assert!((g - want).abs() < 1e-12);
            assert!((mean - want).abs() < 3.0 * se, "t={t}: {mean} vs {want} ({se})");
        }
    }

    #[test]
    fn correlated_covariance_probe_matches_series() {
        for &(rho, want) in &[
            (0.0, 0.0),
            (0.5, 0.066_913_159_770_683_15),
            (1.0, std::f64::consts::PI * std::f64::consts::PI / 24.0),
        ] {
            let (cov, se) = correlated_gaussian_covariance_probe(rho, 100_000, 7).unwrap();
            let slack = if rho == 1.0 { 1e-12 } else { 0.0 };
            assert!(
                (cov - want).abs() <= 3.0 * se + slack,
                "rho {rho}: {cov} vs {want} (se {se})"
            );
        }
    }

    #[test]
    fn ensemble_mean_variance_small_scale() {
        // Indicator at R = 2: mean = 4 within 4 SE and variance within 3
        // bootstrap SE of the spectral value; a desk-scale version of the
        // acceptance checks.
        let h = TestFunction::indicator();
        let r = 2.0;
        let n = 400;
        let summary = run_ensemble(&h, r, n, 99, None).unwrap();
        let se = (summary.variance / summary.n_samples as f64).sqrt();
        assert!(
            (summary.mean - 4.0).abs() < 4.0 * se,
            "mean {} se {se}",
            summary.mean
        );
        let (values, _) = sample_statistics(&h, r, n, 99).unwrap();
        let boot = bootstrap_variance_se(&values, 1234);
        let exact = crate::variance::variance_exact(&h, r, 1e-7).unwrap();
        assert!(
            (summary.variance - exact).abs() < 3.0 * boot,
            "var {} exact {exact} boot {boot}",
            summary.variance
        );
    }

    #[test]
    fn ensemble_deterministic_across_thread_counts() {
        let h = TestFunction::indicator();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_ensemble(&h, 1.5, 150, 31, None).unwrap())
        };
        let a = run(1);
        let b = run(2);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.variance.to_bits(), b.variance.to_bits());
        assert_eq!(a.standardized_samples, b.standardized_samples);
    }

    #[test]
    fn zero_test_function_rejected() {
        let text = "0.5 1.0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0";
        let zero = TestFunction::from_grid_str(text).unwrap();
        assert!(matches!(
            sample_statistics(&zero, 2.0, 120, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn log_minus_small_scale() {
        // Mean n(R, log^-) = R^2/2 within 4 SE at R = 3.
        let r = 3.0;
        let rep = log_minus_probe(&[r], 400, 17).unwrap();
        let row = &rep.rows[0];
        assert!(
            (row.mean - 0.5 * r * r).abs() < 4.0 * row.mean_se,
            "mean {} vs {} (se {})",
            row.mean,
            0.5 * r * r,
            row.mean_se
        );
    }

    #[test]
    fn two_sample_ks_sanity() {
        let mut rng = crate::rng::stream(3);
        let a: Vec<f64> = (0..2000).map(|_| crate::rng::standard_normal(&mut rng)).collect();
        let b: Vec<f64> = (0..2000).map(|_| crate::rng::standard_normal(&mut rng)).collect();
        assert!(ks_two_sample(&a, &b) < 0.06);
        let shifted: Vec<f64> = a.iter().map(|x| x + 1.0).collect();
        assert!(ks_two_sample(&a, &shifted) > 0.3);
    }
}
