//! One-dimensional quadrature building blocks.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes are computed by Newton iteration on the Legendre recurrence and
/// cached per order.
pub fn gauss_legendre(n: usize) -> std::sync::Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<(Vec<f64>, Vec<f64>)>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let rule = std::sync::Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, d) = legendre_and_derivative(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (nodes, weights) = (&rule.0, &rule.1);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = crate::kahan::KahanSum::new();
    for (&x, &w) in nodes.iter().zip(weights) {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

/// Integral over `[a, b]` split into panels of at most `panel` width, each
/// integrated with an `n`-point Gauss-Legendre rule. Panel results are
/// accumulated in index order, so the value is deterministic.
pub fn integrate_panels<F: Fn(f64) -> f64 + Sync>(
    f: F,
    a: f64,
    b: f64,
    panel: f64,
    n: usize,
) -> f64 {
    assert!(b >= a && panel > 0.0);
    let count = ((b - a) / panel).ceil().max(1.0) as usize;
    let width = (b - a) / count as f64;
    let mut acc = crate::kahan::KahanSum::new();
    for i in 0..count {
        let lo = a + i as f64 * width;
        acc.add(integrate_gl(&f, lo, lo + width, n));
    }
    acc.value()
}

/// Globally adaptive Simpson integration with Richardson error control.
///
/// Returns the value and an error estimate; errs if the tolerance cannot be
/// certified within the refinement budget.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    struct Frame {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        depth: u32,
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    let mut stack = vec![Frame {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        depth: 0,
    }];
    let mut total = crate::kahan::KahanSum::new();
    let mut err_total = 0.0;
    let mut evals: usize = 3;
    while let Some(fr) = stack.pop() {
        let m = 0.5 * (fr.a + fr.b);
        let lm = 0.5 * (fr.a + m);
        let rm = 0.5 * (m + fr.b);
        let flm = f(lm);
        let frm = f(rm);
        evals += 2;
        let left = simpson(fr.fa, flm, fr.fm, m - fr.a);
        let right = simpson(fr.fm, frm, fr.fb, fr.b - m);
        let delta = left + right - fr.whole;
        // Local tolerance proportional to the subinterval length.
        let local_tol = tol * (fr.b - fr.a) / (b - a);
        if delta.abs() <= 15.0 * local_tol || fr.depth >= 48 {
            if fr.depth >= 48 && delta.abs() > 15.0 * local_tol {
                return Err(Error::QuadratureTolerance {
                    requested: tol,
                    achieved: delta.abs() / 15.0,
                });
            }
            total.add(left + right + delta / 15.0);
            err_total += delta.abs() / 15.0;
        } else {
            stack.push(Frame {
                a: fr.a,
                b: m,
                fa: fr.fa,
                fm: flm,
                fb: fr.fm,
                whole: left,
                depth: fr.depth + 1,
            });
            stack.push(Frame {
                a: m,
                b: fr.b,
                fa: fr.fm,
                fm: frm,
                fb: fr.fb,
                whole: right,
                depth: fr.depth + 1,
            });
        }
        if evals > 40_000_000 {
            return Err(Error::QuadratureTolerance {
                requested: tol,
                achieved: err_total.max(delta.abs() / 15.0),
            });
        }
    }
    Ok((total.value(), err_total))
}
