//! Zero extraction and validation for truncated GEF realizations.
//!
//! The pipeline: simultaneous Aberth-Ehrlich iteration on the (rescaled)
//! coefficient polynomial proposes roots, Newton refinement against the
//! log-domain evaluator polishes them, and the argument principle on the
//! bounding circle certifies that no zero inside the disk was missed. A
//! count mismatch is a hard error, never a warning.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::sample::{log_tail, GefSample};
use crate::special::ln_gamma;
use crate::testfn::TestFunction;

/// Relative width of the exclusion band around validation circles.
pub const GUARD_BAND_FRACTION: f64 = 1e-3;
/// Zeros closer than this are treated as a multiple zero (an error: the
/// process has simple zeros almost surely).
pub const SEPARATION_FLOOR: f64 = 1e-9;
/// Default bound on `|F*(a)|` at returned zeros.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;

/// Zeros of one realization inside a disk, with the argument-principle
/// certificate that the extraction is complete.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroSet {
    pub zeros: Vec<Complex64>,
    /// `|F*(a)|` at each returned zero.
    pub residuals: Vec<f64>,
    pub disk_center: Complex64,
    pub disk_radius: f64,
    /// Winding number of `F` along the disk boundary.
    pub validated_count: usize,
}

/// Rescaled-polynomial evaluator for a region `|z| <= region_radius`.
///
/// Working coefficients are `c_k = zeta_k exp(k ln s - lgamma(k+1)/2 - m)`
/// with `s` the region radius and `m` the peak coefficient log-magnitude, so
/// Horner evaluation at `u = z/s` stays within double range; values are
/// reported as mantissa plus log-scale. The working degree is reduced to the
/// point where the dropped tail is below 1e-13 relative to the scale of `F`
/// on the region, far below every residual tolerance in use; refinement and
/// winding validation both run against this evaluator.
pub(crate) struct DiskEvaluator {
    scale: f64,
    log_norm: f64,
    coeffs: Vec<Complex64>,
}

impl DiskEvaluator {
    pub(crate) fn new(sample: &GefSample, region_radius: f64) -> Result<Self> {
        if region_radius > sample.valid_radius * (1.0 + 1e-12) {
            return Err(Error::RadiusExceeded {
                requested: region_radius,
                valid: sample.valid_radius,
            });
        }
        let s = region_radius.max(1e-3);
        let degree = if sample.valid_radius.is_finite() {
            // Degree for 1e-13 accuracy relative to E|F|^2 = e^{s^2} on the rim.
            let target = s * s + 2.0 * (1e-13f64).ln();
            let mut n = sample.truncation_degree.min((s * s).ceil() as usize + 8);
            while n < sample.truncation_degree && log_tail(s, n) > target {
                n += 8;
            }
            n.min(sample.truncation_degree)
        } else {
            sample.truncation_degree
        };
        let ln_s = s.ln();
        let mut log_mags = Vec::with_capacity(degree + 1);
        let mut peak = f64::NEG_INFINITY;
        for k in 0..=degree {
            let l = k as f64 * ln_s - 0.5 * ln_gamma(k as f64 + 1.0);
            peak = peak.max(l);
            log_mags.push(l);
        }
        if peak > 690.0 {
            return Err(Error::InvalidParameter(format!(
                "extraction region radius {region_radius} too large for scaled evaluation (max ~37)"
            )));
        }
        let coeffs = sample
            .coefficients
            .iter()
            .take(degree + 1)
            .zip(&log_mags)
            .map(|(zeta, &l)| zeta * (l - peak).exp())
            .collect();
        Ok(DiskEvaluator {
            scale: s,
            log_norm: peak,
            coeffs,
        })
    }

    pub(crate) fn scale(&self) -> f64 {
        self.scale
    }

    /// Horner evaluation at `u = z/s`: mantissas of `P` and `dP/du`, and the
    /// log-scale such that `F*(z) = P(u) exp(log_scale)`.
    #[inline]
    fn eval(&self, z: Complex64) -> (Complex64, Complex64, f64) {
        let u = z / self.scale;
        let mut p = *self.coeffs.last().unwrap();
        let mut dp = Complex64::ZERO;
        for c in self.coeffs.iter().rev().skip(1) {
            dp = dp * u + p;
            p = p * u + c;
        }
        (p, dp, self.log_norm - 0.5 * z.norm_sqr())
    }

    /// `ln |F*(z)|`; `-inf` exactly at a zero.
    pub(crate) fn log_abs_star(&self, z: Complex64) -> f64 {
        let (p, _, log_scale) = self.eval(z);
        if p == Complex64::ZERO {
            f64::NEG_INFINITY
        } else {
            p.norm().ln() + log_scale
        }
    }

    /// Mantissa (carries the phase of `F*`) and `ln|F*|` in one evaluation.
    #[inline]
    fn phase_and_log_abs(&self, z: Complex64) -> (Complex64, f64) {
        let (p, _, log_scale) = self.eval(z);
        let log_abs = if p == Complex64::ZERO {
            f64::NEG_INFINITY
        } else {
            p.norm().ln() + log_scale
        };
        (p, log_abs)
    }

    /// Newton displacement `F(z)/F'(z)` in plane units.
    fn newton_step(&self, z: Complex64) -> Option<Complex64> {
        let (p, dp, _) = self.eval(z);
        if dp == Complex64::ZERO {
            return None;
        }
        Some(self.scale * p / dp)
    }
}

/// All roots of `sum_k coeffs[k] u^k` by Aberth-Ehrlich simultaneous
/// iteration with Bini's convex-hull initial guesses.
///
/// Roots with `|u * scale - center| <= focus_radius + slack` are iterated to
/// near machine precision; far roots only to 1e-7 (the caller discards them,
/// they matter only through the repulsion sum).
fn aberth_roots(
    coeffs: &[Complex64],
    scale: f64,
    center: Complex64,
    focus_radius: f64,
) -> Result<Vec<Complex64>> {
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1] == Complex64::ZERO {
        hi -= 1;
    }
    if hi <= 1 {
        return Ok(Vec::new());
    }
    let coeffs = &coeffs[..hi];
    let degree = coeffs.len() - 1;

    // Bini initialization: one ring of guesses per edge of the upper convex
    // hull of (k, ln|c_k|); the edge slope estimates the root modulus.
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::ZERO)
        .map(|(k, c)| (k as f64, c.norm().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b.1 - a.1) * (p.0 - a.0) <= (p.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut roots = Vec::with_capacity(degree);
    for (ring, w) in hull.windows(2).enumerate() {
        let (k1, v1) = w[0];
        let (k2, v2) = w[1];
        let count = (k2 - k1) as usize;
        let radius = ((v1 - v2) / (k2 - k1)).exp();
        let offset = (0.37 + 0.61 * ring as f64).fract();
        for j in 0..count {
            let angle = 2.0 * std::f64::consts::PI * (j as f64 / count as f64 + offset);
            roots.push(Complex64::from_polar(radius, angle));
        }
    }
    debug_assert_eq!(roots.len(), degree);

    let horner = |u: Complex64| {
        let mut p = coeffs[degree];
        let mut dp = Complex64::ZERO;
        for c in coeffs.iter().rev().skip(1) {
            dp = dp * u + p;
            p = p * u + c;
        }
        (p, dp)
    };

    let mut frozen = vec![false; degree];
    let slack = 0.03 * scale + 1e-6;
    for _sweep in 0..600 {
        let mut all_frozen = true;
        for i in 0..degree {
            if frozen[i] {
                continue;
            }
            let u = roots[i];
            let (p, dp) = horner(u);
            if p == Complex64::ZERO {
                frozen[i] = true;
                continue;
            }
            if dp == Complex64::ZERO {
                roots[i] = u + Complex64::new(1e-6, 1e-6) * (1.0 + u.norm());
                all_frozen = false;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = Complex64::ZERO;
            for (j, r) in roots.iter().enumerate() {
                if j != i {
                    let d = u - r;
                    if d != Complex64::ZERO {
                        repulsion += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom == Complex64::ZERO {
                ratio
            } else {
                ratio / denom
            };
            let next = u - step;
            roots[i] = next;
            let inner = (next * scale - center).norm() <= focus_radius + slack;
            let tol = if inner { 5e-14 } else { 1e-7 };
            if step.norm() <= tol * (1.0 + next.norm()) {
                frozen[i] = true;
            } else {
                all_frozen = false;
            }
        }
        if all_frozen {
            return Ok(roots);
        }
    }
    for (i, f) in frozen.iter().enumerate() {
        let w = roots[i] * scale;
        if !f && (w - center).norm() <= focus_radius + slack {
            return Err(Error::NewtonDivergence { re: w.re, im: w.im });
        }
    }
    Ok(roots)
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * std::f64::consts::PI);
    if a > std::f64::consts::PI {
        a -= 2.0 * std::f64::consts::PI;
    } else if a < -std::f64::consts::PI {
        a += 2.0 * std::f64::consts::PI;
    }
    a
}

/// Exact winding number of `F` along `|z - center| = radius` by adaptively
/// refined phase tracking; every accepted increment is below pi/2, so the
/// integer is certified. Triggers the guard band when the modulus collapses
/// near the contour.
fn winding_number(ev: &DiskEvaluator, center: Complex64, radius: f64) -> Result<usize> {
    let circle_point =
        |t: f64| center + Complex64::from_polar(radius, t);
    let guard_log = (GUARD_BAND_FRACTION * radius * 0.05).ln();

    struct Seg {
        t0: f64,
        p0: Complex64,
        t1: f64,
        p1: Complex64,
        depth: u32,
    }

    let nodes = ((radius * radius).ceil() as usize * 8 + 64).max(64);
    let mut min_log_abs = f64::INFINITY;
    let mut probe = |t: f64| -> Result<Complex64> {
        let (p, log_abs) = ev.phase_and_log_abs(circle_point(t));
        if p == Complex64::ZERO {
            return Err(Error::GuardBand {
                radius,
                min_modulus: 0.0,
            });
        }
        min_log_abs = min_log_abs.min(log_abs);
        Ok(p)
    };

    let mut stack: Vec<Seg> = Vec::with_capacity(nodes + 64);
    {
        let step = 2.0 * std::f64::consts::PI / nodes as f64;
        let mut prev_t = 0.0;
        let mut prev_p = probe(0.0)?;
        for i in 1..=nodes {
            let t = i as f64 * step;
            let p = probe(t)?;
            stack.push(Seg {
                t0: prev_t,
                p0: prev_p,
                t1: t,
                p1: p,
                depth: 0,
            });
            prev_t = t;
            prev_p = p;
        }
    }

    let mut total = KahanSum::new();
    while let Some(seg) = stack.pop() {
        let d = wrap_angle(seg.p1.arg() - seg.p0.arg());
        if d.abs() < std::f64::consts::FRAC_PI_2 && seg.depth >= 1 {
            total.add(d);
            continue;
        }
        if seg.depth > 30 {
            if min_log_abs < guard_log {
                return Err(Error::GuardBand {
                    radius,
                    min_modulus: min_log_abs.exp(),
                });
            }
            return Err(Error::PhaseUncertified { radius });
        }
        let tm = 0.5 * (seg.t0 + seg.t1);
        let pm = probe(tm)?;
        stack.push(Seg {
            t0: seg.t0,
            p0: seg.p0,
            t1: tm,
            p1: pm,
            depth: seg.depth + 1,
        });
        stack.push(Seg {
            t0: tm,
            p0: pm,
            t1: seg.t1,
            p1: seg.p1,
            depth: seg.depth + 1,
        });
    }
    if min_log_abs < guard_log {
        return Err(Error::GuardBand {
            radius,
            min_modulus: min_log_abs.exp(),
        });
    }
    let turns = total.value() / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-3 || rounded < -0.5 {
        return Err(Error::PhaseUncertified { radius });
    }
    Ok(rounded as usize)
}

/// Exact number of zeros of `F` strictly inside the circle, via the argument
/// principle.
pub fn count_zeros_circle(sample: &GefSample, center: Complex64, radius: f64) -> Result<usize> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(
            "circle radius must be positive".into(),
        ));
    }
    let ev = DiskEvaluator::new(sample, center.norm() + radius)?;
    winding_number(&ev, center, radius)
}

/// All zeros of the truncated polynomial inside the disk, Newton-refined and
/// validated against the boundary winding number.
pub fn find_zeros_disk(
    sample: &GefSample,
    center: Complex64,
    radius: f64,
    residual_tol: f64,
) -> Result<ZeroSet> {
    if !(radius > 0.0 && residual_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "disk radius and residual tolerance must be positive".into(),
        ));
    }
    let ev = DiskEvaluator::new(sample, center.norm() + radius)?;
    let winding = winding_number(&ev, center, radius)?;
    let raw = aberth_roots(&ev.coeffs, ev.scale(), center, radius)?;

    let guard = GUARD_BAND_FRACTION * radius * 0.05;
    let mut zeros: Vec<Complex64> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    for u in raw {
        let mut w = u * ev.scale();
        if (w - center).norm() > radius + 0.02 * ev.scale() {
            continue;
        }
        let mut ok = false;
        for _ in 0..16 {
            match ev.newton_step(w) {
                Some(step) => {
                    w -= step;
                    if step.norm() <= 1e-14 * (1.0 + w.norm()) {
                        ok = true;
                        break;
                    }
                }
                None => break,
            }
        }
        if !ok && ev.log_abs_star(w).exp() > residual_tol {
            return Err(Error::NewtonDivergence { re: w.re, im: w.im });
        }
        let dist = (w - center).norm();
        if dist >= radius {
            continue;
        }
        if radius - dist < guard {
            // The winding certificate cannot arbitrate a zero this close to
            // the contour; the caller should nudge the radius.
            return Err(Error::GuardBand {
                radius,
                min_modulus: radius - dist,
            });
        }
        let residual = ev.log_abs_star(w).exp();
        if residual > residual_tol {
            return Err(Error::NewtonDivergence { re: w.re, im: w.im });
        }
        zeros.push(w);
        residuals.push(residual);
    }

    let mut order: Vec<usize> = (0..zeros.len()).collect();
    order.sort_by(|&a, &b| {
        zeros[a]
            .re
            .total_cmp(&zeros[b].re)
            .then(zeros[a].im.total_cmp(&zeros[b].im))
    });
    let zeros: Vec<Complex64> = order.iter().map(|&i| zeros[i]).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();

    for i in 0..zeros.len() {
        for j in i + 1..zeros.len() {
            let d = (zeros[i] - zeros[j]).norm();
            if d <= SEPARATION_FLOOR {
                return Err(Error::SeparationViolation {
                    floor: SEPARATION_FLOOR,
                    distance: d,
                });
            }
        }
    }

    if zeros.len() != winding {
        return Err(Error::CountMismatch {
            winding,
            found: zeros.len(),
        });
    }
    Ok(ZeroSet {
        zeros,
        residuals,
        disk_center: center,
        disk_radius: radius,
        validated_count: winding,
    })
}

/// [`find_zeros_disk`] with automatic outward nudges of the disk radius when
/// a zero sits in the guard band of the boundary. Returns the zero set and
/// the radius actually used.
pub fn find_zeros_disk_nudged(
    sample: &GefSample,
    center: Complex64,
    radius: f64,
    residual_tol: f64,
) -> Result<(ZeroSet, f64)> {
    let mut last_err = None;
    for k in 0..=12 {
        let r = radius * (1.0 + k as f64 * GUARD_BAND_FRACTION);
        match find_zeros_disk(sample, center, r, residual_tol) {
            Ok(zs) => return Ok((zs, r)),
            Err(e @ (Error::GuardBand { .. } | Error::PhaseUncertified { .. })) => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

/// Linear statistic `n(R, h) = sum_a h(a / R)` over the extracted zeros.
///
/// Errs when the support of `h(./R)` is not contained in the extraction
/// disk, which would silently undercount.
pub fn linear_statistic(zs: &ZeroSet, h: &TestFunction, scale_r: f64) -> Result<f64> {
    let needed = scale_r * h.support_radius;
    let available = zs.disk_radius - zs.disk_center.norm();
    if needed > available * (1.0 + 1e-12) {
        return Err(Error::SupportViolation { needed, available });
    }
    let mut acc = KahanSum::new();
    for a in &zs.zeros {
        acc.add(h.eval(a / scale_r));
    }
    Ok(acc.value())
}

/// Data underlying Jensen's integral formula on the circle `|z| = radius`
/// (possibly nudged outward to respect the guard band).
#[derive(Debug, Clone)]
pub struct JensenData {
    pub used_radius: f64,
    /// `sum_{|a| < r} ln(r / |a|)`, i.e. the linear statistic of
    /// `log^+(r/|.|)` at scale `r`.
    pub log_sum: f64,
    /// `(1/2pi) \oint ln|F*(r e^{it})| dt`.
    pub avg_log_star: f64,
    /// `ln |F(0)|`.
    pub log_abs_f0: f64,
    pub zeros_inside: usize,
}

/// Circle average of `ln|F*|` with panels split at the angles of
/// near-contour zeros.
fn circle_average(ev: &DiskEvaluator, radius: f64, near_angles: &[f64], tol: f64) -> Result<f64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut cuts: Vec<f64> = near_angles.iter().map(|a| a.rem_euclid(two_pi)).collect();
    cuts.push(0.0);
    cuts.push(two_pi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let f = |t: f64| ev.log_abs_star(Complex64::from_polar(radius, t));
    let mut acc = KahanSum::new();
    for w in cuts.windows(2) {
        if w[1] - w[0] < 1e-13 {
            continue;
        }
        let (v, _) = crate::quad::adaptive_simpson(&f, w[0], w[1], tol * (w[1] - w[0]) / two_pi)?;
        acc.add(v);
    }
    Ok(acc.value() / two_pi)
}

/// Evaluates both sides of Jensen's identity at (a nudged version of)
/// `radius`; requires `F(0) != 0` and a sample valid slightly beyond the
/// circle.
pub fn jensen_data(sample: &GefSample, radius: f64) -> Result<JensenData> {
    let f0 = sample.coefficients[0];
    if f0 == Complex64::ZERO {
        return Err(Error::InvalidParameter(
            "Jensen identity requires F(0) != 0".into(),
        ));
    }
    // Room for the circle nudges plus a ring of near-contour zeros for the
    // quadrature splitting; extraction below also nudges outward by ~1.3%.
    let margin = if sample.valid_radius.is_finite() {
        let m = (sample.valid_radius / 1.013 - radius * 1.009).min(0.45);
        if m <= 0.05 {
            return Err(Error::RadiusExceeded {
                requested: radius * 1.009 * 1.013,
                valid: sample.valid_radius,
            });
        }
        m
    } else {
        0.45
    };
    let (ring, _) = find_zeros_disk_nudged(
        sample,
        Complex64::ZERO,
        radius + margin,
        DEFAULT_RESIDUAL_TOL,
    )?;

    let mut last_err: Option<Error> = None;
    for k in 0..=8 {
        let r = radius * (1.0 + k as f64 * GUARD_BAND_FRACTION);
        if r > ring.disk_radius {
            break;
        }
        let closest = ring
            .zeros
            .iter()
            .map(|a| (a.norm() - r).abs())
            .fold(f64::INFINITY, f64::min);
        if closest < GUARD_BAND_FRACTION * r {
            last_err = Some(Error::GuardBand {
                radius: r,
                min_modulus: closest,
            });
            continue;
        }
        let ev = DiskEvaluator::new(sample, r)?;
        let winding = match winding_number(&ev, Complex64::ZERO, r) {
            Ok(w) => w,
            Err(e @ (Error::GuardBand { .. } | Error::PhaseUncertified { .. })) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let inside: Vec<&Complex64> = ring.zeros.iter().filter(|a| a.norm() < r).collect();
        if inside.len() != winding {
            return Err(Error::CountMismatch {
                winding,
                found: inside.len(),
            });
        }
        let mut log_sum = KahanSum::new();
        for a in &inside {
            log_sum.add((r / a.norm()).ln());
        }
        let near: Vec<f64> = ring
            .zeros
            .iter()
            .filter(|a| (a.norm() - r).abs() < 0.35)
            .map(|a| a.arg())
            .collect();
        let avg_log_star = circle_average(&ev, r, &near, 1e-9)?;
        return Ok(JensenData {
            used_radius: r,
            log_sum: log_sum.value(),
            avg_log_star,
            log_abs_f0: f0.norm().ln(),
            zeros_inside: inside.len(),
        });
    }
    Err(last_err.unwrap_or(Error::PhaseUncertified { radius }))
}

/// Absolute discrepancy in Jensen's identity,
/// `|(1/2pi) \oint ln|F| - ln|F(0)| - sum_a ln(r/|a|)|`: the completeness
/// oracle tying evaluation, zero extraction and quadrature together.
pub fn jensen_check(sample: &GefSample, radius: f64) -> Result<f64> {
    let d = jensen_data(sample, radius)?;
    let avg_log_f = d.avg_log_star + 0.5 * d.used_radius * d.used_radius;
    Ok((avg_log_f - d.log_abs_f0 - d.log_sum).abs())
}

/// `int_{|x| <= rho} U dA` for `U = ln|F*|`, computed exactly from the zeros
/// via the radial Jensen identity:
/// `pi rho^2 ln|F(0)| + pi sum_a [rho^2 ln(rho/|a|) - (rho^2-|a|^2)/2]
///  - pi rho^4/4`.
pub fn potential_disk_integral(sample: &GefSample, rho: f64) -> Result<f64> {
    let f0 = sample.coefficients[0];
    if f0 == Complex64::ZERO {
        return Err(Error::InvalidParameter(
            "potential integral requires F(0) != 0".into(),
        ));
    }
    let (zs, _) = find_zeros_disk_nudged(sample, Complex64::ZERO, rho, DEFAULT_RESIDUAL_TOL)?;
    let mut acc = KahanSum::new();
    acc.add(rho * rho * f0.norm().ln());
    for a in &zs.zeros {
        let r_a = a.norm();
        if r_a < rho {
            acc.add(rho * rho * (rho / r_a).ln() - 0.5 * (rho * rho - r_a * r_a));
        }
    }
    acc.add(-rho.powi(4) / 4.0);
    Ok(std::f64::consts::PI * acc.value())
}

/// Writes zero sets as CSV rows `(sample_index, re, im, residual)`.
pub fn write_csv<W: Write>(mut w: W, sets: &[(usize, &ZeroSet)]) -> std::io::Result<()> {
    writeln!(w, "sample_index,re,im,residual")?;
    for (idx, zs) in sets {
        for (a, r) in zs.zeros.iter().zip(&zs.residuals) {
            writeln!(w, "{},{},{},{}", idx, a.re, a.im, r)?;
        }
    }
    Ok(())
}
