//! Deterministic file emission: provenance headers, atomic writes, and
//! dependency-free SVG plots.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_NAME: &str = "gef";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block embedded in every output: tool version, master seed and
/// the hash of the fully resolved configuration (defaults included). No
/// timestamps, so reruns are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub master_seed: u64,
    pub config_sha256: String,
    pub resolved_config: serde_json::Value,
}

impl Provenance {
    pub fn new<C: Serialize>(master_seed: u64, config: &C) -> Self {
        let resolved_config = serde_json::to_value(config).expect("config serializes");
        let canonical = serde_json::to_string(&resolved_config).expect("canonical json");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let config_sha256 = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>();
        Provenance {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            master_seed,
            config_sha256,
            resolved_config,
        }
    }

    /// Single-line header for CSV files (a `#` comment line above the
    /// RFC-4180 body).
    pub fn csv_line(&self) -> String {
        format!(
            "# provenance tool={} version={} seed={} config_sha256={}",
            self.tool, self.version, self.master_seed, self.config_sha256
        )
    }
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// JSON document with a leading provenance object and stable key order.
pub fn write_json<T: Serialize>(
    path: &Path,
    provenance: &Provenance,
    payload: &T,
) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        provenance: &'a Provenance,
        #[serde(flatten)]
        payload: &'a T,
    }
    let text = serde_json::to_string_pretty(&Doc {
        provenance,
        payload,
    })
    .expect("payload serializes");
    write_atomic(path, text.as_bytes())
}

/// CSV file: provenance comment, then an RFC-4180 body.
pub fn write_csv(path: &Path, provenance: &Provenance, body: &str) -> std::io::Result<()> {
    let text = format!("{}\n{}", provenance.csv_line(), body);
    write_atomic(path, text.as_bytes())
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

// ---- SVG ----------------------------------------------------------------

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn map_x(x: f64, x0: f64, x1: f64) -> f64 {
    MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN)
}

fn map_y(y: f64, y0: f64, y1: f64) -> f64 {
    H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN)
}

fn axes(title: &str, x0: f64, x1: f64, y0: f64, y1: f64) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "<rect x='0' y='0' width='{W}' height='{H}' fill='white'/>\n"
    ));
    s.push_str(&format!(
        "<text x='{}' y='24' font-family='monospace' font-size='14' text-anchor='middle'>{title}</text>\n",
        W / 2.0
    ));
    s.push_str(&format!(
        "<line x1='{m}' y1='{b}' x2='{r}' y2='{b}' stroke='black'/>\n<line x1='{m}' y1='{t}' x2='{m}' y2='{b}' stroke='black'/>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN,
        t = MARGIN
    ));
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        s.push_str(&format!(
            "<text x='{:.2}' y='{}' font-family='monospace' font-size='11' text-anchor='middle'>{:.3}</text>\n",
            map_x(fx, x0, x1),
            H - MARGIN + 18.0,
            fx
        ));
        s.push_str(&format!(
            "<text x='{}' y='{:.2}' font-family='monospace' font-size='11' text-anchor='end'>{:.3}</text>\n",
            MARGIN - 6.0,
            map_y(fy, y0, y1) + 4.0,
            fy
        ));
    }
    s
}

/// Polyline chart of one or more named series over a shared x grid.
pub fn svg_line_chart(title: &str, series: &[(&str, &[f64], &[f64])]) -> String {
    let mut x0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for (_, xs, ys) in series {
        for &x in *xs {
            x0 = x0.min(x);
            x1 = x1.max(x);
        }
        for &y in *ys {
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let colors = ["#1f6feb", "#d1242f", "#1a7f37", "#8250df"];
    let mut s = format!("<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}'>\n");
    s.push_str(&axes(title, x0, x1, y0, y1));
    for (i, (name, xs, ys)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let pts: Vec<String> = xs
            .iter()
            .zip(*ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", map_x(x, x0, x1), map_y(y, y0, y1)))
            .collect();
        s.push_str(&format!(
            "<polyline fill='none' stroke='{color}' stroke-width='1.5' points='{}'/>\n",
            pts.join(" ")
        ));
        s.push_str(&format!(
            "<text x='{}' y='{}' font-family='monospace' font-size='12' fill='{color}'>{name}</text>\n",
            W - MARGIN - 150.0,
            MARGIN + 16.0 * (i as f64 + 1.0)
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Histogram of standardized samples with the standard normal density
/// overlaid.
pub fn svg_histogram_vs_normal(title: &str, standardized: &[f64]) -> String {
    let bins = 41;
    let (lo, hi) = (-4.1, 4.1);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0.0f64; bins];
    for &x in standardized {
        if x >= lo && x < hi {
            counts[((x - lo) / width) as usize] += 1.0;
        }
    }
    let n = standardized.len() as f64;
    // density-normalized bars
    for c in &mut counts {
        *c /= n * width;
    }
    let normal = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let ymax = counts
        .iter()
        .cloned()
        .fold(normal(0.0), f64::max)
        * 1.1;
    let mut s = format!("<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}'>\n");
    s.push_str(&axes(title, lo, hi, 0.0, ymax));
    for (i, &c) in counts.iter().enumerate() {
        let x = lo + i as f64 * width;
        let px0 = map_x(x, lo, hi);
        let px1 = map_x(x + width, lo, hi);
        let py = map_y(c, 0.0, ymax);
        s.push_str(&format!(
            "<rect x='{px0:.2}' y='{py:.2}' width='{:.2}' height='{:.2}' fill='#9ecbff' stroke='#326891' stroke-width='0.5'/>\n",
            px1 - px0,
            H - MARGIN - py
        ));
    }
    let pts: Vec<String> = (0..=200)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 200.0;
            format!("{:.2},{:.2}", map_x(x, lo, hi), map_y(normal(x), 0.0, ymax))
        })
        .collect();
    s.push_str(&format!(
        "<polyline fill='none' stroke='#d1242f' stroke-width='1.5' points='{}'/>\n",
        pts.join(" ")
    ));
    s.push_str("</svg>\n");
    s
}
