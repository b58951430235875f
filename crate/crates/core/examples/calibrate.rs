//! One-off calibration run backing the frozen constants in the library:
//! the comparability window of the two-sided variance bracket, the envelope
//! of `M / min(lam^4, 1)`, and a handful of regression values. Run with
//! `cargo run -p gef --release --example calibrate`.

use gef::testfn::TestFunction;
use gef::variance::{spectral_density_m, two_sided_bracket, variance_exact};

fn main() {
    println!("== M(lam) anchors ==");
    for lam in [1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 12.0, 20.0, 100.0, 1000.0] {
        let m = spectral_density_m(lam, 1e-11);
        println!(
            "M({lam:>8}) = {m:.12e}   M/min(l^4,1) = {:.6}   M - 1/pi = {:+.3e}",
            m / lam.powi(4).min(1.0),
            m - 1.0 / std::f64::consts::PI
        );
    }

    println!("\n== envelope of M / min(lam^4, 1) over [1e-3, 1e3] ==");
    let grid = 600;
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    for i in 0..=grid {
        let lam = 10f64.powf(-3.0 + 6.0 * i as f64 / grid as f64);
        let ratio = spectral_density_m(lam, 1e-10) / lam.powi(4).min(1.0);
        if ratio < lo.0 {
            lo = (ratio, lam);
        }
        if ratio > hi.0 {
            hi = (ratio, lam);
        }
    }
    println!("min ratio {:.6} at lam = {:.4}", lo.0, lo.1);
    println!("max ratio {:.6} at lam = {:.4}", hi.0, hi.1);

    println!("\n== V / bracket over the built-in suite ==");
    let functions = [
        "indicator",
        "gauss-bump",
        "cone:0.5",
        "smooth-bump",
        "log-minus",
        "abnormal:0.5",
    ];
    let mut rmin = (f64::INFINITY, String::new());
    let mut rmax = (f64::NEG_INFINITY, String::new());
    for name in functions {
        let h = TestFunction::builtin(name).unwrap();
        for r in [2.0, 6.0, 16.0] {
            let v = variance_exact(&h, r, 1e-8).unwrap();
            let b = two_sided_bracket(&h, r).unwrap();
            let ratio = v / b;
            println!("{name:>14} R={r:>4}: V = {v:.6e}, B = {b:.6e}, V/B = {ratio:.5}");
            if ratio < rmin.0 {
                rmin = (ratio, format!("{name} R={r}"));
            }
            if ratio > rmax.0 {
                rmax = (ratio, format!("{name} R={r}"));
            }
        }
    }
    println!("min V/B = {:.5} ({})", rmin.0, rmin.1);
    println!("max V/B = {:.5} ({})", rmax.0, rmax.1);

    println!("\n== misc regression anchors ==");
    println!("truncation_degree(6, 1e-12) = {}", gef::sample::truncation_degree(6.0, 1e-12).unwrap());
    let d1 = gef::correlation::pair_correlation_smooth(1.0, 1e-12).unwrap();
    println!("d(1.0) = {:.12e}", d1.smooth_density);
    let d005 = gef::correlation::pair_correlation_smooth(0.05, 1e-12).unwrap();
    println!("d(0.05) = {:.12e} (vs -1/pi^2 = {:.12e})", d005.smooth_density, -1.0 / (std::f64::consts::PI * std::f64::consts::PI));
    println!("zeta(3)/(16 pi) = {:.10e}", gef::special::zeta(3.0) / (16.0 * std::f64::consts::PI));
    println!("zeta(3/2)/(8 pi^1.5) = {:.10e}", gef::special::zeta(1.5) / (8.0 * std::f64::consts::PI.powf(1.5)));
    println!("(pi/4) zeta(3) = {:.10e}", 0.25 * std::f64::consts::PI * gef::special::zeta(3.0));
}
