//! Sampling and evaluation of truncated Gaussian Entire Function realizations.
//!
//! A realization is the random polynomial `F_N(z) = sum_{k<=N} zeta_k z^k /
//! sqrt(k!)` with i.i.d. standard complex Gaussian coefficients. The
//! truncation degree carries a deterministic certificate: the tail variance
//! `sum_{k>N} R^{2k}/k!` at the declared valid radius is below the squared
//! tail tolerance. All evaluation happens through the normalized function
//! `F*(z) = F(z) exp(-|z|^2/2)`, summed term by term in the log domain so
//! nothing overflows (raw `F` leaves double range near `|z| = 38`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::special::ln_gamma;
use crate::LOG_ABS_GAUSSIAN_MEAN;

/// One truncated GEF realization.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GefSample {
    pub seed: u64,
    pub truncation_degree: usize,
    pub valid_radius: f64,
    pub tail_tolerance: f64,
    /// `zeta_0 ..= zeta_N`, length `truncation_degree + 1`.
    pub coefficients: Vec<Complex64>,
}

/// Value of the random potential `U = log|F*|` at a point.
///
/// A zero of `F` at the evaluation point is reported as a tagged negative
/// infinity rather than an error, because potential integrals must pass
/// through the logarithmic singularities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    /// `log|F*(z)|` in nats; `-inf` exactly at a zero.
    pub log_modulus_star: f64,
    /// `log|F*(z)| - b` with `b = E log|zeta| = -gamma/2`.
    pub centered: f64,
    /// `arg F*(z)` in radians; 0 by convention at a zero.
    pub phase: f64,
}

impl PotentialValue {
    fn from_value(v: Complex64) -> Self {
        let log_modulus_star = if v == Complex64::ZERO {
            f64::NEG_INFINITY
        } else {
            v.norm().ln()
        };
        PotentialValue {
            log_modulus_star,
            centered: log_modulus_star - LOG_ABS_GAUSSIAN_MEAN,
            phase: if v == Complex64::ZERO { 0.0 } else { v.arg() },
        }
    }

    /// True when the evaluation point is (numerically) a zero of `F`.
    pub fn is_zero(&self) -> bool {
        self.log_modulus_star == f64::NEG_INFINITY
    }
}

/// `ln sum_{k>n} R^{2k}/k!`, accumulated backwards in the log domain.
///
/// The suffix is summed from a cut-off where the geometric remainder bound is
/// negligible, and that bound is folded into the result, so the returned
/// value is a certified upper estimate of the true log-tail.
pub fn log_tail(radius: f64, n: usize) -> f64 {
    assert!(radius > 0.0);
    let log_r2 = 2.0 * radius.ln();
    let term = |k: usize| k as f64 * log_r2 - ln_gamma(k as f64 + 1.0);
    // Find a cut-off K past the peak where both the term is tiny relative to
    // the full series scale and the term ratio is below 1/2.
    let peak = (radius * radius).ceil() as usize;
    let mut k_max = (2 * peak).max(n + 8).max(32);
    loop {
        let ratio_ok = radius * radius / (k_max as f64 + 1.0) < 0.5;
        if ratio_ok && term(k_max) < -745.0 - radius * radius {
            break;
        }
        k_max += k_max / 2 + 8;
    }
    // Geometric bound on everything past k_max.
    let mut acc = term(k_max + 1) + std::f64::consts::LN_2;
    for k in (n + 1..=k_max).rev() {
        let t = term(k);
        // log-add-exp
        let (hi, lo) = if t > acc { (t, acc) } else { (acc, t) };
        acc = hi + (lo - hi).exp().ln_1p();
    }
    acc
}

/// Least `N` such that `sum_{k>N} R^{2k}/k! <= tail_tol^2`, with `N` at least
/// `ceil(R^2)`.
pub fn truncation_degree(radius: f64, tail_tol: f64) -> Result<usize> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "truncation radius must be positive and finite, got {radius}"
        )));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance must lie in (0,1), got {tail_tol}"
        )));
    }
    let target = 2.0 * tail_tol.ln();
    if target < f64::MIN_POSITIVE.ln() {
        return Err(Error::TailToleranceUnderflow(tail_tol));
    }
    let floor = (radius * radius).ceil().max(1.0) as usize;
    // The log-tail is strictly decreasing in N; exponential search up, then
    // binary search for the least admissible degree.
    let mut lo = floor;
    if log_tail(radius, lo) <= target {
        return Ok(lo);
    }
    let mut hi = lo.max(8);
    while log_tail(radius, hi) > target {
        hi = hi * 2 + 8;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if log_tail(radius, mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(floor))
}

/// Draws a truncated realization from its self-contained seed.
///
/// `degree` must be at least the certified degree for `(valid_radius,
/// tail_tol)`; the coefficient stream is a pure function of `seed`.
pub fn sample_gef(seed: u64, degree: usize, valid_radius: f64, tail_tol: f64) -> Result<GefSample> {
    let required = truncation_degree(valid_radius, tail_tol)?;
    if degree < required {
        return Err(Error::DegreeTooSmall {
            required,
            given: degree,
        });
    }
    let mut rng = crate::rng::stream(seed);
    let coefficients = (0..=degree)
        .map(|_| crate::rng::complex_std_gaussian(&mut rng))
        .collect();
    Ok(GefSample {
        seed,
        truncation_degree: degree,
        valid_radius,
        tail_tolerance: tail_tol,
        coefficients,
    })
}

/// Ensemble sample `index` under `master_seed`, at the certified degree.
pub fn sample_gef_indexed(
    master_seed: u64,
    index: u64,
    valid_radius: f64,
    tail_tol: f64,
) -> Result<GefSample> {
    let degree = truncation_degree(valid_radius, tail_tol)?;
    sample_gef(
        crate::rng::substream_seed(master_seed, index),
        degree,
        valid_radius,
        tail_tol,
    )
}

impl GefSample {
    /// Deterministic injection of explicit coefficients (for tests and
    /// closed-form checks). The polynomial is exact, so every radius is
    /// valid.
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Self {
        assert!(!coefficients.is_empty());
        GefSample {
            seed: 0,
            truncation_degree: coefficients.len() - 1,
            valid_radius: f64::INFINITY,
            tail_tolerance: 0.0,
            coefficients,
        }
    }

    fn check_radius(&self, z: Complex64) -> Result<()> {
        let r = z.norm();
        if r > self.valid_radius * (1.0 + 1e-12) {
            return Err(Error::RadiusExceeded {
                requested: r,
                valid: self.valid_radius,
            });
        }
        Ok(())
    }

    /// `F*(z) = F(z) exp(-|z|^2/2)` together with the potential value at `z`.
    ///
    /// Terms are `zeta_k exp(k ln z - lgamma(k+1)/2 - |z|^2/2)`; every scaled
    /// term has magnitude O(1), so the summation never leaves double range.
    pub fn evaluate_star(&self, z: Complex64) -> Result<(Complex64, PotentialValue)> {
        self.check_radius(z)?;
        if z == Complex64::ZERO {
            let v = self.coefficients[0];
            return Ok((v, PotentialValue::from_value(v)));
        }
        let r = z.norm();
        let log_r = r.ln();
        let rot = Complex64::from_polar(1.0, z.arg());
        let mut log_mag = -0.5 * r * r; // exponent of the k-th scaled term
        let mut phase = Complex64::new(1.0, 0.0);
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (k, zeta) in self.coefficients.iter().enumerate() {
            if k > 0 {
                log_mag += log_r - 0.5 * (k as f64).ln();
                phase *= rot;
            }
            if log_mag > -745.0 {
                let term = zeta * phase * log_mag.exp();
                re.add(term.re);
                im.add(term.im);
            }
        }
        let v = Complex64::new(re.value(), im.value());
        Ok((v, PotentialValue::from_value(v)))
    }

    /// Direct (linear-domain) summation oracle for `F*`, valid while the raw
    /// series stays in double range; restricted to `|z| <= 15`.
    pub fn evaluate_star_direct(&self, z: Complex64) -> Result<Complex64> {
        self.check_radius(z)?;
        if z.norm() > 15.0 {
            return Err(Error::InvalidParameter(
                "direct summation restricted to |z| <= 15".into(),
            ));
        }
        let mut term = Complex64::new(1.0, 0.0);
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (k, zeta) in self.coefficients.iter().enumerate() {
            if k > 0 {
                term *= z / (k as f64).sqrt();
            }
            let t = zeta * term;
            re.add(t.re);
            im.add(t.im);
        }
        Ok(Complex64::new(re.value(), im.value()) * (-0.5 * z.norm_sqr()).exp())
    }

    /// Evaluator for the projective translation `(T_kappa F)`.
    pub fn projective_translate(&self, kappa: Complex64) -> Translated<'_> {
        Translated {
            sample: self,
            kappa,
            working_radius: self.valid_radius - kappa.norm(),
        }
    }
}

/// `E F(z) conj(F(w)) = exp(z conj(w))`. Overflows double range once
/// `Re(z conj(w))` exceeds about 709; see [`covariance_kernel_log`].
pub fn covariance_kernel(z: Complex64, w: Complex64) -> Complex64 {
    (z * w.conj()).exp()
}

/// Log-domain representation of the covariance kernel: returns `z conj(w)`.
pub fn covariance_kernel_log(z: Complex64, w: Complex64) -> Complex64 {
    z * w.conj()
}

/// Normalized correlation of `F*(z)` and `F*(w)`: `exp(-|z-w|^2/2)`.
pub fn normalized_correlation(z: Complex64, w: Complex64) -> f64 {
    (-0.5 * (z - w).norm_sqr()).exp()
}

/// View of a sample under the projective translation
/// `(T_kappa f)(z) = f(kappa + z) exp(-z conj(kappa) - |kappa|^2/2)`,
/// which maps GEFs to GEFs in law.
pub struct Translated<'a> {
    sample: &'a GefSample,
    kappa: Complex64,
    working_radius: f64,
}

impl Translated<'_> {
    pub fn working_radius(&self) -> f64 {
        self.working_radius
    }

    /// `(T_kappa F)*(z)`; equals `F*(kappa + z)` rotated by the unimodular
    /// factor `exp(i Im(kappa conj(z)))`, so moduli are translated exactly.
    pub fn star(&self, z: Complex64) -> Result<(Complex64, PotentialValue)> {
        if z.norm() > self.working_radius * (1.0 + 1e-12) {
            return Err(Error::RadiusExceeded {
                requested: z.norm(),
                valid: self.working_radius,
            });
        }
        let (base, _) = self.sample.evaluate_star(self.kappa + z)?;
        let v = base * Complex64::from_polar(1.0, (self.kappa * z.conj()).im);
        Ok((v, PotentialValue::from_value(v)))
    }

    /// Raw `(T_kappa F)(z)`; subject to the usual `exp(|z|^2/2)` growth.
    pub fn raw(&self, z: Complex64) -> Result<Complex64> {
        let (star, _) = self.star(z)?;
        Ok(star * (0.5 * z.norm_sqr()).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: linear-domain scan of the tail sums (valid while
    /// e^{R^2} is representable).
    fn truncation_oracle(radius: f64, tail_tol: f64) -> usize {
        let mut terms = Vec::new();
        let mut t: f64 = 1.0;
        let mut k = 0usize;
        loop {
            k += 1;
            t *= radius * radius / k as f64;
            terms.push(t);
            if k > (radius * radius) as usize + 10 && t < 1e-300 {
                break;
            }
        }
        let mut tail = 0.0;
        let mut suffix = vec![0.0; terms.len() + 1];
        for i in (0..terms.len()).rev() {
            tail += terms[i];
            suffix[i] = tail;
        }
        // suffix[i] = sum_{k > i} R^{2k}/k!
        let target = tail_tol * tail_tol;
        let floor = (radius * radius).ceil() as usize;
        for n in 0..terms.len() {
            if suffix[n] <= target {
                return n.max(floor);
            }
        }
        unreachable!()
    }

    #[test]
    fn truncation_degree_small_radius() {
        let n = truncation_degree(1e-4, 1e-12).unwrap();
        assert!(n >= 1 && n < 20, "n = {n}");
    }

    #[test]
    fn truncation_degree_matches_bruteforce_scan() {
        for &(r, tol) in &[(1.0, 1e-12), (2.5, 1e-8), (6.0, 1e-12), (9.0, 1e-6)] {
            let got = truncation_degree(r, tol).unwrap();
            let want = truncation_oracle(r, tol);
            assert_eq!(got, want, "radius {r} tol {tol}");
        }
        // Frozen regression value from the scan oracle.
        assert_eq!(truncation_degree(6.0, 1e-12).unwrap(), 141);
    }

    #[test]
    fn truncation_degree_monotone_in_radius() {
        let n6 = truncation_degree(6.0, 1e-12).unwrap();
        let n12 = truncation_degree(12.0, 1e-12).unwrap();
        assert!(n12 > n6);
    }

    #[test]
    fn truncation_tolerance_underflow_rejected() {
        assert!(matches!(
            truncation_degree(2.0, 1e-200),
            Err(Error::TailToleranceUnderflow(_))
        ));
    }

    #[test]
    fn emitted_sample_satisfies_tail_certificate() {
        let s = sample_gef(9, truncation_degree(7.0, 1e-10).unwrap(), 7.0, 1e-10).unwrap();
        let lt = log_tail(s.valid_radius, s.truncation_degree);
        assert!(lt <= 2.0 * s.tail_tolerance.ln());
        // One less coefficient must break the certificate (least degree).
        let lt_short = log_tail(s.valid_radius, s.truncation_degree - 1);
        assert!(lt_short > 2.0 * s.tail_tolerance.ln());
    }

    #[test]
    fn sampling_rejects_low_degree() {
        let required = truncation_degree(5.0, 1e-12).unwrap();
        assert!(matches!(
            sample_gef(1, required - 1, 5.0, 1e-12),
            Err(Error::DegreeTooSmall { .. })
        ));
    }

    #[test]
    fn sampling_deterministic() {
        let degree = truncation_degree(3.0, 1e-10).unwrap();
        let a = sample_gef(77, degree, 3.0, 1e-10).unwrap();
        let b = sample_gef(77, degree, 3.0, 1e-10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coefficient_moments() {
        // E zeta = 0 and E |zeta|^2 = 1 within 4 standard errors.
        let n = 100_000u64;
        let mut mean = Complex64::ZERO;
        let mut second = 0.0;
        for i in 0..n {
            let s = sample_gef(crate::rng::substream_seed(5, i), 1, 1e-6, 0.5).unwrap();
            mean += s.coefficients[0];
            second += s.coefficients[0].norm_sqr();
        }
        mean /= n as f64;
        second /= n as f64;
        // Var |zeta|^2 = 1 (exponential), Var Re zeta = 1/2.
        let se_mean = (0.5 / n as f64).sqrt();
        let se_second = (1.0 / n as f64).sqrt();
        assert!(mean.re.abs() < 4.0 * se_mean && mean.im.abs() < 4.0 * se_mean);
        assert!((second - 1.0).abs() < 4.0 * se_second);
    }

    #[test]
    fn star_at_origin_is_first_coefficient() {
        let s = sample_gef(3, truncation_degree(3.0, 1e-8).unwrap(), 3.0, 1e-8).unwrap();
        let (v, pot) = s.evaluate_star(Complex64::ZERO).unwrap();
        assert_eq!(v, s.coefficients[0]);
        assert!((pot.log_modulus_star - v.norm().ln()).abs() < 1e-15);
        assert!((pot.centered - (pot.log_modulus_star - LOG_ABS_GAUSSIAN_MEAN)).abs() < 1e-15);
    }

    #[test]
    fn star_zero_value_tagged() {
        // F(z) = -1 + z vanishes at z = 1.
        let s = GefSample::from_coefficients(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        let (v, pot) = s.evaluate_star(Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(v, Complex64::ZERO);
        assert!(pot.is_zero());
        assert_eq!(pot.log_modulus_star, f64::NEG_INFINITY);
    }

    #[test]
    fn star_normalization_in_law() {
        // At |z| = 10 the ensemble mean of |F*|^2 is 1 within 4 SE.
        let z = Complex64::new(6.0, -8.0);
        let n = 10_000u64;
        let degree = truncation_degree(10.0, 1e-9).unwrap();
        let mut acc = 0.0;
        for i in 0..n {
            let s = sample_gef(crate::rng::substream_seed(21, i), degree, 10.0, 1e-9).unwrap();
            acc += s.evaluate_star(z).unwrap().0.norm_sqr();
        }
        acc /= n as f64;
        assert!((acc - 1.0).abs() < 4.0 / (n as f64).sqrt(), "mean {acc}");
    }

    #[test]
    fn out_of_radius_rejected() {
        let s = sample_gef(3, truncation_degree(3.0, 1e-8).unwrap(), 3.0, 1e-8).unwrap();
        assert!(matches!(
            s.evaluate_star(Complex64::new(3.5, 0.0)),
            Err(Error::RadiusExceeded { .. })
        ));
    }

    #[test]
    fn log_domain_matches_direct_summation() {
        let degree = truncation_degree(15.0, 1e-10).unwrap();
        let s = sample_gef(1234, degree, 15.0, 1e-10).unwrap();
        for &(re, im) in &[(0.3, -0.2), (2.0, 1.0), (-7.5, 4.0), (10.0, -11.0)] {
            let z = Complex64::new(re, im);
            let (log_dom, _) = s.evaluate_star(z).unwrap();
            let direct = s.evaluate_star_direct(z).unwrap();
            let denom = direct.norm().max(1e-6);
            assert!(
                (log_dom - direct).norm() / denom < 1e-10,
                "mismatch at {z}: {log_dom} vs {direct}"
            );
        }
    }

    #[test]
    fn covariance_kernel_values() {
        let z = Complex64::new(1.0, 2.0);
        assert!((normalized_correlation(z, z) - 1.0).abs() < 1e-15);
        let x = Complex64::new(6.0, 0.0);
        let rho = normalized_correlation(Complex64::ZERO, x);
        assert!(((rho - (-18.0f64).exp()) / rho).abs() < 1e-12);
        assert!((rho - 1.523e-8).abs() < 1e-11);
        let w = Complex64::new(0.5, -0.25);
        let cov = covariance_kernel(z, w);
        assert!((cov.ln() - covariance_kernel_log(z, w)).norm() < 1e-12);
    }

    #[test]
    fn empirical_covariance_matches_kernel() {
        // Sample covariance of F*(z1) conj(F*(z2)) at |z1 - z2| = 1.
        let z1 = Complex64::new(1.0, 1.0);
        let z2 = Complex64::new(1.0, 2.0);
        let n = 100_000u64;
        let degree = truncation_degree(3.0, 1e-9).unwrap();
        let mut acc = Complex64::ZERO;
        let mut acc_sq = 0.0;
        for i in 0..n {
            let s = sample_gef(crate::rng::substream_seed(31, i), degree, 3.0, 1e-9).unwrap();
            let p = s.evaluate_star(z1).unwrap().0 * s.evaluate_star(z2).unwrap().0.conj();
            acc += p;
            acc_sq += p.norm_sqr();
        }
        acc /= n as f64;
        let se = ((acc_sq / n as f64 - acc.norm_sqr()).max(0.0) / n as f64).sqrt();
        let expected = (-0.5f64).exp();
        assert!(
            (acc.norm() - expected).abs() < 4.0 * se,
            "got {} expected {expected} (se {se})",
            acc.norm()
        );
    }

    #[test]
    fn translate_at_zero_is_identity() {
        let s = sample_gef(8, truncation_degree(5.0, 1e-10).unwrap(), 5.0, 1e-10).unwrap();
        let t = s.projective_translate(Complex64::ZERO);
        for &(re, im) in &[(0.1, 0.7), (2.0, -1.0)] {
            let z = Complex64::new(re, im);
            assert_eq!(t.star(z).unwrap().0, s.evaluate_star(z).unwrap().0);
        }
    }

    #[test]
    fn translate_preserves_star_modulus() {
        let s = sample_gef(8, truncation_degree(5.0, 1e-10).unwrap(), 5.0, 1e-10).unwrap();
        let kappa = Complex64::new(1.5, -0.5);
        let t = s.projective_translate(kappa);
        for &(re, im) in &[(0.4, 0.8), (-1.0, 2.0), (2.5, 0.0)] {
            let z = Complex64::new(re, im);
            let lhs = t.star(z).unwrap().0.norm();
            let rhs = s.evaluate_star(kappa + z).unwrap().0.norm();
            assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + rhs));
        }
    }

    #[test]
    fn translated_process_has_gef_covariance() {
        // E (T_k F)(z1) conj((T_k F)(z2)) = exp(z1 conj(z2)) within 4 SE.
        let kappa = Complex64::new(2.0, 1.0);
        let z1 = Complex64::new(0.6, 0.2);
        let z2 = Complex64::new(-0.3, 0.5);
        let n = 100_000u64;
        let degree = truncation_degree(4.0, 1e-9).unwrap();
        let mut acc = Complex64::ZERO;
        let mut acc_sq = 0.0;
        for i in 0..n {
            let s = sample_gef(crate::rng::substream_seed(57, i), degree, 4.0, 1e-9).unwrap();
            let t = s.projective_translate(kappa);
            let p = t.raw(z1).unwrap() * t.raw(z2).unwrap().conj();
            acc += p;
            acc_sq += p.norm_sqr();
        }
        acc /= n as f64;
        let expected = covariance_kernel(z1, z2);
        let se = ((acc_sq / n as f64 - acc.norm_sqr()).max(0.0) / n as f64).sqrt();
        assert!(
            (acc - expected).norm() < 4.0 * se,
            "got {acc} expected {expected} se {se}"
        );
    }

    #[test]
    fn serialization_roundtrip_bit_exact() {
        let s = sample_gef(99, truncation_degree(4.0, 1e-9).unwrap(), 4.0, 1e-9).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: GefSample = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}
