//! Scalar special functions used across the crate.
//!
//! Bessel, log-gamma and error functions are delegated to `libm` (MUSL
//! ports). The zeta values and the dilogarithm are computed here by direct
//! series with an accelerated tail, because frozen constants derived from
//! them serve as oracles elsewhere.

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub use libm::{erf, erfc, j0 as bessel_j0, j1 as bessel_j1, lgamma as ln_gamma};

/// `Gamma(x)` for positive `x`.
pub fn gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_gamma(x).exp()
}

/// Riemann zeta for real `s > 1`.
///
/// Partial sum to `N = 64` plus the Euler-Maclaurin tail through the third
/// Bernoulli correction; absolute error below 1e-15 for `s >= 1.2`.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta series requires s > 1, got {s}");
    let n = 64usize;
    let mut sum = crate::kahan::KahanSum::new();
    for k in 1..n {
        sum.add((k as f64).powf(-s));
    }
    let nf = n as f64;
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    tail += s / 12.0 * nf.powf(-s - 1.0);
    tail -= s * (s + 1.0) * (s + 2.0) / 720.0 * nf.powf(-s - 3.0);
    tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * nf.powf(-s - 5.0);
    sum.add(tail);
    sum.value()
}

/// Dilogarithm `Li_2(x)` on `[0, 1]`.
pub fn li2(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "li2 defined here on [0,1], got {x}");
    const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    if x == 1.0 {
        return ZETA2;
    }
    if x > 0.5 {
        return ZETA2 - x.ln() * (1.0 - x).ln() - li2(1.0 - x);
    }
    let mut sum = crate::kahan::KahanSum::new();
    let mut pow = x;
    let mut k = 1u32;
    while pow > f64::EPSILON * 1e-2 || k < 4 {
        sum.add(pow / (k as f64 * k as f64));
        pow *= x;
        k += 1;
        if k > 2000 {
            break;
        }
    }
    sum.value()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Survival function of the Kolmogorov distribution:
/// `P(sup_t |B(t)| > lambda)` for the Brownian bridge.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Jacobi-transformed series, fast for small lambda.
        let mut sum = 0.0;
        for k in 1..=20u32 {
            let m = (2 * k - 1) as f64;
            sum += (-m * m * std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * sum;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for k in 1..=20u32 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}
