//! Deterministic skeleton of the almost-independence property: nets on
//! compact sets, the coupling Gram matrix, the interaction bound, and the
//! Gershgorin positivity certificate, plus a seeded empirical decorrelation
//! check of the observable consequence.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::testfn::TestFunction;

/// A compact set in the plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Compact {
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Points { points: Vec<[f64; 2]> },
}

impl Compact {
    pub fn diameter(&self) -> f64 {
        match self {
            Compact::Rect { x0, y0, x1, y1 } => ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt(),
            Compact::Points { points } => {
                let mut d: f64 = 0.0;
                for (i, a) in points.iter().enumerate() {
                    for b in &points[i + 1..] {
                        d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
                    }
                }
                d
            }
        }
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        match self {
            Compact::Rect { x0, y0, x1, y1 } => {
                let dx = (x0 - p.re).max(0.0).max(p.re - x1);
                let dy = (y0 - p.im).max(0.0).max(p.im - y1);
                (dx * dx + dy * dy).sqrt()
            }
            Compact::Points { points } => points
                .iter()
                .map(|a| ((a[0] - p.re).powi(2) + (a[1] - p.im).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Compact::Rect { x0, y0, x1, y1 } => !(x1 >= x0 && y1 >= y0),
            Compact::Points { points } => points.is_empty(),
        }
    }

    fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self {
            Compact::Rect { x0, y0, x1, y1 } => (*x0, *y0, *x1, *y1),
            Compact::Points { points } => {
                let mut bb = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in points {
                    bb.0 = bb.0.min(p[0]);
                    bb.1 = bb.1.min(p[1]);
                    bb.2 = bb.2.max(p[0]);
                    bb.3 = bb.3.max(p[1]);
                }
                bb
            }
        }
    }

    pub fn center(&self) -> Complex64 {
        let (x0, y0, x1, y1) = self.bounding_box();
        Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    }
}

/// Distance between two compacts.
pub fn compact_distance(a: &Compact, b: &Compact) -> f64 {
    match (a, b) {
        (Compact::Rect { x0, y0, x1, y1 }, Compact::Rect { x0: u0, y0: v0, x1: u1, y1: v1 }) => {
            let dx = (x0 - u1).max(0.0).max(u0 - x1);
            let dy = (y0 - v1).max(0.0).max(v0 - y1);
            (dx * dx + dy * dy).sqrt()
        }
        (Compact::Points { points }, other) | (other, Compact::Points { points }) => points
            .iter()
            .map(|p| other.distance_to(Complex64::new(p[0], p[1])))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Minimal admissible control parameter: `sqrt(log(3 + diam))`.
pub fn min_admissible_rho(compact: &Compact) -> f64 {
    (3.0 + compact.diameter()).ln().sqrt()
}

/// Net attached to one compact: the unit-lattice points within `1/sqrt(2)`
/// of it (a `1/sqrt(2)`-net), and `ceil(A^2 rho^2)` equidistant points on
/// the unit circle around each of them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompactNet {
    pub compact_id: usize,
    pub compact: Compact,
    pub lattice_points: Vec<Complex64>,
    pub circle_points: Vec<Complex64>,
    pub rho: f64,
    pub a_param: f64,
}

pub fn build_net(compact: &Compact, a_param: f64, rho: f64, id: usize) -> Result<CompactNet> {
    if compact.is_empty() {
        return Err(Error::EmptyCompact);
    }
    if a_param < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "separation constant A must be >= 1, got {a_param}"
        )));
    }
    let min_rho = min_admissible_rho(compact);
    if rho < min_rho * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "rho = {rho} below admissible floor sqrt(log(3+diam)) = {min_rho}"
        )));
    }
    let (x0, y0, x1, y1) = compact.bounding_box();
    let reach = std::f64::consts::FRAC_1_SQRT_2 + 1e-12;
    let mut lattice_points = Vec::new();
    let (ix0, ix1) = ((x0 - 1.0).floor() as i64, (x1 + 1.0).ceil() as i64);
    let (iy0, iy1) = ((y0 - 1.0).floor() as i64, (y1 + 1.0).ceil() as i64);
    for iy in iy0..=iy1 {
        for ix in ix0..=ix1 {
            let p = Complex64::new(ix as f64, iy as f64);
            if compact.distance_to(p) <= reach {
                lattice_points.push(p);
            }
        }
    }
    debug_assert!(!lattice_points.is_empty());
    let per_circle = (a_param * a_param * rho * rho).ceil() as usize;
    let mut circle_points = Vec::with_capacity(lattice_points.len() * per_circle);
    for c in &lattice_points {
        for j in 0..per_circle {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / per_circle as f64;
            circle_points.push(c + Complex64::from_polar(1.0, angle));
        }
    }
    Ok(CompactNet {
        compact_id: id,
        compact: compact.clone(),
        lattice_points,
        circle_points,
        rho,
        a_param,
    })
}

/// Number of circle points per lattice point, `ceil(A^2 rho^2)`.
pub fn points_per_circle(net: &CompactNet) -> usize {
    (net.a_param * net.a_param * net.rho * net.rho).ceil() as usize
}

fn check_disjoint_neighborhoods(nets: &[CompactNet]) -> Result<()> {
    for i in 0..nets.len() {
        for j in i + 1..nets.len() {
            let needed = nets[i].a_param * nets[i].rho + nets[j].a_param * nets[j].rho;
            if compact_distance(&nets[i].compact, &nets[j].compact) <= needed {
                return Err(Error::DisjointnessViolation(
                    nets[i].compact_id,
                    nets[j].compact_id,
                ));
            }
        }
    }
    Ok(())
}

/// Total absolute covariance `sum_{k != j} sum_{zeta in Z_k} e^{-|z-zeta|^2/2}`
/// between a net point of bunch `j` and all foreign bunches. Requires the
/// inflated neighborhoods to be pairwise disjoint.
pub fn interaction_sum(z: Complex64, bunch: usize, nets: &[CompactNet]) -> Result<f64> {
    check_disjoint_neighborhoods(nets)?;
    let mut acc = KahanSum::new();
    for net in nets {
        if net.compact_id == bunch {
            continue;
        }
        for zeta in &net.circle_points {
            acc.add((-0.5 * (z - zeta).norm_sqr()).exp());
        }
    }
    Ok(acc.value())
}

/// The interaction bound `e^{-A^2 rho_j^2 / 5}` the sum is measured against.
pub fn interaction_bound(net: &CompactNet) -> f64 {
    (-net.a_param * net.a_param * net.rho * net.rho / 5.0).exp()
}

/// Hermitian coupling Gram matrix over all net points: diagonal
/// `e^{-A^2 rho_j^2/5}`, zero within a bunch, and
/// `-exp(z conj(zeta) - |z|^2/2 - |zeta|^2/2)` across bunches.
#[derive(Debug, Clone)]
pub struct CouplingGram {
    pub n: usize,
    /// Row-major `n x n`.
    pub matrix: Vec<Complex64>,
    pub bunch_index: Vec<usize>,
    pub points: Vec<Complex64>,
}

pub fn coupling_gram(nets: &[CompactNet]) -> CouplingGram {
    let mut points = Vec::new();
    let mut bunch_index = Vec::new();
    let mut deltas = Vec::new();
    for net in nets {
        for z in &net.circle_points {
            points.push(*z);
            bunch_index.push(net.compact_id);
            deltas.push(interaction_bound(net));
        }
    }
    let n = points.len();
    let mut matrix = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            matrix[i * n + j] = if i == j {
                Complex64::new(deltas[i], 0.0)
            } else if bunch_index[i] == bunch_index[j] {
                Complex64::ZERO
            } else {
                let z = points[i];
                let w = points[j];
                let mag = (-0.5 * (z - w).norm_sqr()).exp();
                -Complex64::from_polar(mag, (z * w.conj()).im)
            };
        }
    }
    CouplingGram {
        n,
        matrix,
        bunch_index,
        points,
    }
}

/// Minimal Gershgorin margin `min_i (G_ii - sum_{j != i} |G_ij|)`.
/// A positive value certifies positive definiteness of the coupling Gram
/// matrix, hence existence of the orthogonalizing perturbation for this
/// configuration. May legitimately be negative for inadmissible
/// configurations; that is a diagnostic, not an error.
pub fn gershgorin_margin(gram: &CouplingGram) -> f64 {
    let n = gram.n;
    let mut margin = f64::INFINITY;
    for i in 0..n {
        let mut row = KahanSum::new();
        for j in 0..n {
            if j != i {
                row.add(gram.matrix[i * n + j].norm());
            }
        }
        margin = margin.min(gram.matrix[i * n + i].re - row.value());
    }
    margin
}

/// Report of the empirical decorrelation probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecorrelationReport {
    pub correlation: f64,
    pub mean_first: f64,
    pub mean_second: f64,
    pub n_samples: usize,
    pub separation: f64,
}

/// Empirical correlation of localized linear statistics over two squares:
/// per realization, `sum_a h((a - c_i)/R)` for the two square centers; for
/// well-separated squares the kernel decay makes the true correlation far
/// below Monte Carlo noise.
pub fn empirical_decorrelation(
    h: &TestFunction,
    first: &Compact,
    second: &Compact,
    scale_r: f64,
    n_samples: usize,
    master_seed: u64,
) -> Result<DecorrelationReport> {
    if first.is_empty() || second.is_empty() {
        return Err(Error::EmptyCompact);
    }
    let c1 = first.center();
    let c2 = second.center();
    let identical = (c1 - c2).norm() == 0.0;
    let reach = |c: Complex64| c.norm() + scale_r * h.support_radius;
    let extraction = reach(c1).max(reach(c2)) + 0.5;
    let valid = extraction * 1.02 + 0.05;
    let degree = crate::sample::truncation_degree(valid, 1e-10)?;
    let stats: Vec<Result<(f64, f64)>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = crate::sample::sample_gef(
                crate::rng::substream_seed(master_seed, i),
                degree,
                valid,
                1e-10,
            )?;
            let (zs, _) = crate::zeros::find_zeros_disk_nudged(
                &s,
                Complex64::ZERO,
                extraction,
                crate::zeros::DEFAULT_RESIDUAL_TOL,
            )?;
            let mut s1 = KahanSum::new();
            let mut s2 = KahanSum::new();
            for a in &zs.zeros {
                s1.add(h.eval((a - c1) / scale_r));
                s2.add(h.eval((a - c2) / scale_r));
            }
            Ok((s1.value(), s2.value()))
        })
        .collect();
    let mut xs = Vec::with_capacity(n_samples);
    let mut ys = Vec::with_capacity(n_samples);
    let mut failed = 0usize;
    for r in stats {
        match r {
            Ok((x, y)) => {
                xs.push(x);
                ys.push(y);
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
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..xs.len() {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let correlation = if identical {
        1.0
    } else {
        sxy / (sxx * syy).sqrt()
    };
    Ok(DecorrelationReport {
        correlation,
        mean_first: mx,
        mean_second: my,
        n_samples: xs.len(),
        separation: compact_distance(first, second),
    })
}
