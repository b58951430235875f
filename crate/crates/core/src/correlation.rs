//! Closed-form correlation structure of the potential and the zero process:
//! Laguerre expansion coefficients of `log|zeta|`, the log-modulus
//! covariance series, and the smooth off-diagonal density of the two-point
//! measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::special::EULER_GAMMA;
use crate::testfn::TestFunction;

const PI: f64 = std::f64::consts::PI;

/// Coefficient `c_{2 alpha}` of the Laguerre (Hermite-Ito radial) expansion
/// of `log|zeta|`: `-gamma/2` at `alpha = 0`, `(-1)^{alpha+1} / (2 alpha)`
/// for `alpha >= 1`.
pub fn laguerre_coefficient(alpha: usize) -> f64 {
    if alpha == 0 {
        -0.5 * EULER_GAMMA
    } else if alpha % 2 == 1 {
        1.0 / (2.0 * alpha as f64)
    } else {
        -1.0 / (2.0 * alpha as f64)
    }
}

/// Independent quadrature oracle for the same coefficient:
/// `(-1)^alpha int_0^inf (1/2) ln t  L_alpha(t) e^{-t} dt`
/// with `L_alpha` the Laguerre polynomials, integrated after the
/// substitution `t = e^u` (which tames the logarithmic endpoint).
pub fn laguerre_coefficient_oracle(alpha: usize) -> Result<f64> {
    let laguerre = |a: usize, t: f64| -> f64 {
        let mut l0 = 1.0;
        if a == 0 {
            return l0;
        }
        let mut l1 = 1.0 - t;
        for k in 1..a {
            let kf = k as f64;
            let l2 = ((2.0 * kf + 1.0 - t) * l1 - kf * l0) / (kf + 1.0);
            l0 = l1;
            l1 = l2;
        }
        l1
    };
    let integrand = |u: f64| {
        let t = u.exp();
        0.5 * u * laguerre(alpha, t) * (-t).exp() * t
    };
    let (value, err) = crate::quad::adaptive_simpson(integrand, -45.0, 8.0, 1e-11)?;
    if err > 1e-9 {
        return Err(Error::QuadratureTolerance {
            requested: 1e-9,
            achieved: err,
        });
    }
    Ok(if alpha % 2 == 0 { value } else { -value })
}

/// Covariance of `log|zeta_1|`, `log|zeta_2|` for standard complex Gaussians
/// with correlation modulus `rho`: the series `(1/4) sum rho^{2a} / a^2`
/// (a dilogarithm), summed directly with a certified geometric tail bound.
pub fn log_modulus_covariance(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "correlation modulus must lie in [0,1], got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let q = rho * rho;
    let mut acc = KahanSum::new();
    let mut pow = q;
    let mut a = 1usize;
    loop {
        acc.add(pow / (a as f64 * a as f64));
        // Remaining tail <= q^{a+1} / ((a+1)^2 (1-q)); for rho = 1 fall back
        // to the Euler-Maclaurin tail of sum 1/a^2.
        if q < 1.0 {
            let bound = pow * q / (((a + 1) * (a + 1)) as f64 * (1.0 - q));
            if bound < 1e-17 {
                break;
            }
        } else if a >= 200_000 {
            let af = a as f64;
            // sum_{k>a} 1/k^2 = 1/a - 1/(2a^2) + 1/(6a^3) - ...
            acc.add(1.0 / af - 0.5 / (af * af) + 1.0 / (6.0 * af * af * af));
            break;
        }
        pow *= q;
        a += 1;
        if a > 100_000_000 {
            let af = a as f64;
            let bound = pow / (af * af * (1.0 - q));
            acc.add(0.5 * bound);
            break;
        }
    }
    Ok(0.25 * acc.value())
}

/// Two-point structure of the zero process at separation `r`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub radius: f64,
    /// Smooth off-diagonal density `d(r)` of the covariance measure per unit
    /// area squared.
    pub smooth_density: f64,
    /// Two-point intensity `1/pi^2 + d(r)`.
    pub with_intensity: f64,
}

/// Smooth part of the two-point measure: the termwise bi-Laplacian of the
/// covariance series,
/// `d(r) = (1/pi^2) sum_{a>=1} (a^2 r^4 - 4 a r^2 + 2) e^{-a r^2}`.
///
/// The three blocks cancel to O(1) from O(1/r^2) pieces at small `r`, so the
/// sum is compensated; the tail is certified by closed geometric bounds.
pub fn pair_correlation_smooth(r: f64, tol: f64) -> Result<PairCorrelation> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pair correlation separation must be positive, got {r}"
        )));
    }
    let s = r * r;
    let q = (-s).exp();
    let mut acc = KahanSum::new();
    let mut a = 1usize;
    let mut e = q; // e^{-a s}
    loop {
        let af = a as f64;
        acc.add((af * af * s * s - 4.0 * af * s + 2.0) * e);
        // Geometric remainder bound on sum_{k>a} (k^2 s^2 + 4 k s + 2) q^k.
        let qn = e * q; // q^{a+1}
        let g0 = qn / (1.0 - q);
        let g1 = qn * ((af + 1.0) - af * q) / ((1.0 - q) * (1.0 - q));
        let g2 = qn
            * ((af + 1.0) * (af + 1.0) - (2.0 * af * af + 2.0 * af - 1.0) * q + af * af * q * q)
            / (1.0 - q).powi(3);
        let bound = s * s * g2 + 4.0 * s * g1 + 2.0 * g0;
        if bound < tol * acc.value().abs().max(1.0) {
            break;
        }
        a += 1;
        e = qn;
        if a > 200_000_000 {
            return Err(Error::QuadratureTolerance {
                requested: tol,
                achieved: bound,
            });
        }
    }
    let d = acc.value() / (PI * PI);
    Ok(PairCorrelation {
        radius: r,
        smooth_density: d,
        with_intensity: 1.0 / (PI * PI) + d,
    })
}

/// Variance through the two-point measure: the diagonal atom
/// `(1/pi) int h(x/R)^2 dA` plus the double integral of `h(x/R) h(y/R)`
/// against the smooth density `d(|x - y|)`.
///
/// The double integral reduces to `int_0^inf d(u) 2 pi u R^2 C_h(u/R) du`
/// with `C_h` the (radial) spatial autocorrelation of `h`.
pub fn variance_from_pair_measure(h: &TestFunction, big_r: f64, tol: f64) -> Result<f64> {
    if !h.is_radial() {
        return Err(Error::InvalidParameter(
            "pair-measure variance implemented for radial h".into(),
        ));
    }
    let atom = big_r * big_r / PI * h.l2_norm * h.l2_norm;
    let u_max = (4.6f64).min(2.0 * big_r * h.support_radius);
    let autocorr = |v: f64| -> f64 {
        // C_h(v) = int h(y) h(y - v e_1) dA(y), polar around the origin.
        let radial = crate::quad::gauss_legendre(96);
        let angular = crate::quad::gauss_legendre(96);
        let half = 0.5 * h.support_radius;
        let mut acc = KahanSum::new();
        for (&nr, &wr) in radial.0.iter().zip(&radial.1) {
            let rho = half + half * nr;
            let h0 = h.eval_radial(rho);
            if h0 == 0.0 {
                continue;
            }
            let mut ring = 0.0;
            for (&nt, &wt) in angular.0.iter().zip(&angular.1) {
                let theta = PI * (nt + 1.0);
                let other = (rho * rho + v * v - 2.0 * rho * v * theta.cos()).max(0.0).sqrt();
                ring += wt * h.eval_radial(other);
            }
            acc.add(wr * h0 * rho * ring * PI);
        }
        acc.value() * half
    };
    let integrand = |u: f64| {
        let d = pair_correlation_smooth(u, 1e-12)
            .map(|p| p.smooth_density)
            .unwrap_or(0.0);
        d * 2.0 * PI * u * big_r * big_r * autocorr(u / big_r)
    };
    let smooth = crate::quad::integrate_panels(integrand, 1e-9, u_max, 0.06, 16);
    let _ = tol;
    Ok(atom + smooth)
}

/// CSV rows `(r, d, with_intensity)` for a separation grid.
pub fn pair_correlation_csv(rs: &[f64], tol: f64) -> Result<String> {
    let mut out = String::from("r,d,with_intensity\n");
    for &r in rs {
        let p = pair_correlation_smooth(r, tol)?;
        out.push_str(&format!(
            "{},{},{}\n",
            p.radius, p.smooth_density, p.with_intensity
        ));
    }
    Ok(out)
}
