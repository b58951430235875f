//! `gef`: seeded experiments on the Gaussian Entire Function zero process.
//!
//! Outputs are reproducible artifacts (CSV/JSON/SVG) with provenance
//! headers; exit codes: 0 success, 2 configuration error, 3 numerical
//! tolerance failure, 4 statistical acceptance failure.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gef::Complex64;
use serde::Serialize;

use config::*;
use output::{out_path, write_csv, write_json, Provenance};

#[derive(Parser)]
#[command(name = "gef", version, about = "Gaussian Entire Function zero-process toolkit")]
struct Cli {
    /// JSON experiment configuration (defaults used when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw truncated realizations and serialize them (optionally with zeros).
    Sample,
    /// Extract validated zero sets to CSV.
    Zeros,
    /// Exact/bounded/asymptotic variance table over an R grid.
    Variance,
    /// Smooth pair-correlation density curve.
    PairCorrelation,
    /// Normality probes (CLT or the log-minus example).
    Normality,
    /// Abnormal-fluctuation probe for h_alpha.
    Abnormal,
    /// Nets, interaction sums, Gershgorin margins, empirical decorrelation.
    AlmostIndep,
    /// Full acceptance suite; nonzero exit on any failure.
    Verify,
    /// Render a previously written verify.json as a readable report.
    Report,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_STATISTICAL: u8 = 4;

fn classify(err: &gef::Error) -> u8 {
    use gef::Error::*;
    match err {
        InvalidParameter(_) | UnknownTestFunction(_) | GridFormat(_) | Io(_) | Json(_)
        | TooFewSamples { .. } | EmptyCompact | TailToleranceUnderflow(_) => EXIT_CONFIG,
        EnsembleAbort { .. } => EXIT_STATISTICAL,
        _ => EXIT_NUMERICAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("warning: global thread pool already initialized");
        }
    }
    let code = match run(&cli) {
        Ok(()) => 0,
        Err(CmdError::Config(msg)) => {
            eprintln!("config error: {msg}");
            EXIT_CONFIG
        }
        Err(CmdError::Tool(e)) => {
            eprintln!("error: {e}");
            classify(&e)
        }
        Err(CmdError::Statistical(msg)) => {
            eprintln!("statistical acceptance failure: {msg}");
            EXIT_STATISTICAL
        }
        Err(CmdError::Numerical(msg)) => {
            eprintln!("numerical tolerance failure: {msg}");
            EXIT_NUMERICAL
        }
    };
    ExitCode::from(code)
}

enum CmdError {
    Config(String),
    Tool(gef::Error),
    Numerical(String),
    Statistical(String),
}

impl From<gef::Error> for CmdError {
    fn from(e: gef::Error) -> Self {
        CmdError::Tool(e)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Tool(gef::Error::Io(e))
    }
}

type CmdResult = Result<(), CmdError>;

fn load_config<T: Default + serde::de::DeserializeOwned>(cli: &Cli) -> Result<T, CmdError> {
    config::load(cli.config.as_deref()).map_err(CmdError::Config)
}

fn run(cli: &Cli) -> CmdResult {
    match cli.command {
        Command::Sample => cmd_sample(cli),
        Command::Zeros => cmd_zeros(cli),
        Command::Variance => cmd_variance(cli),
        Command::PairCorrelation => cmd_pair_correlation(cli),
        Command::Normality => cmd_normality(cli),
        Command::Abnormal => cmd_abnormal(cli),
        Command::AlmostIndep => cmd_almost_indep(cli),
        Command::Verify => cmd_verify(cli),
        Command::Report => cmd_report(cli),
    }
}

fn cmd_sample(cli: &Cli) -> CmdResult {
    let mut cfg: SampleConfig = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let provenance = Provenance::new(cfg.seed, &cfg);
    let mut samples = Vec::new();
    let mut zero_sets = Vec::new();
    for i in 0..cfg.count as u64 {
        let s = gef::sample::sample_gef_indexed(cfg.seed, i, cfg.valid_radius, cfg.tail_tolerance)?;
        if cfg.zeros_radius > 0.0 {
            let (zs, _) = gef::zeros::find_zeros_disk_nudged(
                &s,
                Complex64::ZERO,
                cfg.zeros_radius,
                gef::zeros::DEFAULT_RESIDUAL_TOL,
            )?;
            zero_sets.push((i as usize, zs));
        }
        samples.push(s);
    }
    #[derive(Serialize)]
    struct Payload {
        samples: Vec<gef::sample::GefSample>,
    }
    write_json(
        &out_path(&cli.out, "samples.json"),
        &provenance,
        &Payload { samples },
    )?;
    if !zero_sets.is_empty() {
        let refs: Vec<(usize, &gef::zeros::ZeroSet)> =
            zero_sets.iter().map(|(i, z)| (*i, z)).collect();
        let mut body = Vec::new();
        gef::zeros::write_csv(&mut body, &refs)?;
        write_csv(
            &out_path(&cli.out, "sample_zeros.csv"),
            &provenance,
            &String::from_utf8(body).expect("utf8 csv"),
        )?;
    }
    println!("wrote samples.json ({} samples)", cfg.count);
    Ok(())
}

fn cmd_zeros(cli: &Cli) -> CmdResult {
    let mut cfg: ZerosConfig = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let provenance = Provenance::new(cfg.seed, &cfg);
    let valid = cfg.radius * 1.02 + 0.05;
    let mut sets = Vec::new();
    for i in 0..cfg.count as u64 {
        let s = gef::sample::sample_gef_indexed(cfg.seed, i, valid, 1e-10)?;
        let (zs, _) = gef::zeros::find_zeros_disk_nudged(
            &s,
            Complex64::ZERO,
            cfg.radius,
            cfg.residual_tol,
        )?;
        sets.push((i as usize, zs));
    }
    let refs: Vec<(usize, &gef::zeros::ZeroSet)> = sets.iter().map(|(i, z)| (*i, z)).collect();
    let mut body = Vec::new();
    gef::zeros::write_csv(&mut body, &refs)?;
    write_csv(
        &out_path(&cli.out, "zeros.csv"),
        &provenance,
        &String::from_utf8(body).expect("utf8 csv"),
    )?;
    let total: usize = sets.iter().map(|(_, z)| z.zeros.len()).sum();
    println!("wrote zeros.csv ({total} zeros from {} samples)", cfg.count);
    Ok(())
}

fn cmd_variance(cli: &Cli) -> CmdResult {
    let mut cfg: VarianceConfig = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let provenance = Provenance::new(cfg.seed, &cfg);
    let h = gef::testfn::TestFunction::builtin(&cfg.function)?;
    let mut reports = Vec::new();
    for &r in &cfg.r_list {
        let mut rep = gef::variance::VarianceReport::build(&h, r, cfg.tol)?;
        if cfg.mc_samples > 0 {
            let summary = gef::harness::run_ensemble(&h, r, cfg.mc_samples, cfg.seed, None)?;
            let (values, _) =
                gef::harness::sample_statistics(&h, r, cfg.mc_samples, cfg.seed)?;
            rep.mc_estimate = Some(summary.variance);
            rep.mc_standard_error = Some(gef::harness::bootstrap_variance_se(&values, cfg.seed));
        }
        reports.push(rep);
    }
    let mut body = String::from(gef::variance::VarianceReport::csv_header());
    body.push('\n');
    for rep in &reports {
        body.push_str(&rep.csv_row());
        body.push('\n');
    }
    write_csv(&out_path(&cli.out, "variance.csv"), &provenance, &body)?;
    #[derive(Serialize)]
    struct Payload {
        reports: Vec<gef::variance::VarianceReport>,
    }
    write_json(
        &out_path(&cli.out, "variance.json"),
        &provenance,
        &Payload { reports },
    )?;
    println!("wrote variance.csv / variance.json ({} rows)", cfg.r_list.len());
    Ok(())
}

fn cmd_pair_correlation(cli: &Cli) -> CmdResult {
    let cfg: PairCorrelationConfig = load_config(cli)?;
    let provenance = Provenance::new(0, &cfg);
    let mut rs = Vec::new();
    let mut r = cfg.r_min;
    while r <= cfg.r_max + 1e-12 {
        rs.push(r);
        r += cfg.step;
    }
    let body = gef::correlation::pair_correlation_csv(&rs, cfg.tol)?;
    write_csv(
        &out_path(&cli.out, "pair_correlation.csv"),
        &provenance,
        &body,
    )?;
    let ds: Vec<f64> = rs
        .iter()
        .map(|&r| {
            gef::correlation::pair_correlation_smooth(r, cfg.tol)
                .map(|p| p.with_intensity)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let flat: Vec<f64> = rs
        .iter()
        .map(|_| 1.0 / (std::f64::consts::PI * std::f64::consts::PI))
        .collect();
    let svg = output::svg_line_chart(
        "two-point intensity of zeros vs separation",
        &[
            ("1/pi^2 + d(r)", &rs, &ds),
            ("poisson level 1/pi^2", &rs, &flat),
        ],
    );
    output::write_atomic(&out_path(&cli.out, "pair_correlation.svg"), svg.as_bytes())?;
    println!("wrote pair_correlation.csv / .svg ({} rows)", rs.len());
    Ok(())
}

fn cmd_normality(cli: &Cli) -> CmdResult {
    let mut cfg: NormalityConfig = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let provenance = Provenance::new(cfg.seed, &cfg);
    match cfg.probe {
        NormalityProbe::Clt => {
            let h = gef::testfn::TestFunction::builtin(&cfg.function)?;
            let report = gef::harness::clt_probe(&h, &cfg.r_list, cfg.n_samples, cfg.seed)?;
            let mut body =
                String::from("R,sigma_exact,sigma_mc,ks_statistic,ks_p,skewness,excess_kurtosis,diagnostic,n\n");
            for row in &report.rows {
                body.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    row.r,
                    row.sigma_exact,
                    row.sigma_mc,
                    row.ks_statistic,
                    row.ks_p_value,
                    row.skewness,
                    row.excess_kurtosis,
                    row.hypothesis_diagnostic
                        .map(|d| d.to_string())
                        .unwrap_or_default(),
                    row.n_samples
                ));
            }
            write_csv(&out_path(&cli.out, "normality.csv"), &provenance, &body)?;
            write_json(&out_path(&cli.out, "normality.json"), &provenance, &report)?;
            // Histogram overlay at the largest scale.
            if let Some(&r) = cfg
                .r_list
                .iter()
                .max_by(|a, b| a.partial_cmp(b).unwrap())
            {
                let sigma = gef::variance::variance_exact(&h, r, 1e-7)?.sqrt();
                let seed = gef::rng::substream_seed(
                    cfg.seed,
                    1_000_000 + (cfg.r_list.len() - 1) as u64,
                );
                let summary =
                    gef::harness::run_ensemble(&h, r, cfg.n_samples, seed, Some(sigma))?;
                let svg = output::svg_histogram_vs_normal(
                    &format!("standardized n(R={r}, {}) vs standard normal", h.name),
                    &summary.standardized_samples,
                );
                output::write_atomic(&out_path(&cli.out, "normality.svg"), svg.as_bytes())?;
            }
            println!("wrote normality.csv / .json / .svg");
        }
        NormalityProbe::LogMinus => {
            let report = gef::harness::log_minus_probe(&cfg.r_list, cfg.n_samples, cfg.seed)?;
            let mut body = String::from("R,mean,mean_se,circle_term_variance,n\n");
            for row in &report.rows {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.r, row.mean, row.mean_se, row.circle_term_variance, row.n_samples
                ));
            }
            write_csv(&out_path(&cli.out, "log_minus.csv"), &provenance, &body)?;
            write_json(&out_path(&cli.out, "log_minus.json"), &provenance, &report)?;
            println!("wrote log_minus.csv / .json");
        }
    }
    Ok(())
}

fn cmd_abnormal(cli: &Cli) -> CmdResult {
    let mut cfg: AbnormalConfig = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let provenance = Provenance::new(cfg.seed, &cfg);
    let report = gef::harness::abnormal_probe(cfg.alpha, &cfg.r_list, cfg.n_samples, cfg.seed)?;
    let mut body =
        String::from("R,sigma_mc,scaled_sigma,ks_statistic,ks_p,skewness,excess_kurtosis,n\n");
    for row in &report.rows {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.r,
            row.sigma_mc,
            row.scaled_sigma,
            row.ks_statistic,
            row.ks_p_value,
            row.skewness,
            row.excess_kurtosis,
            row.n_samples
        ));
    }
    write_csv(&out_path(&cli.out, "abnormal.csv"), &provenance, &body)?;
    write_json(&out_path(&cli.out, "abnormal.json"), &provenance, &report)?;
    // Histogram of the statistic at the largest scale.
    if let Some(&r) = cfg.r_list.iter().max_by(|a, b| a.partial_cmp(b).unwrap()) {
        let h = gef::testfn::TestFunction::abnormal(cfg.alpha)?;
        let idx = cfg.r_list.len() - 1;
        let seed = gef::rng::substream_seed(cfg.seed, 2_000_000 + idx as u64);
        let summary = gef::harness::run_ensemble(&h, r, cfg.n_samples, seed, None)?;
        let svg = output::svg_histogram_vs_normal(
            &format!("standardized n(R={r}, h_{}) vs standard normal", cfg.alpha),
            &summary.standardized_samples,
        );
        output::write_atomic(&out_path(&cli.out, "abnormal.svg"), svg.as_bytes())?;
    }
    println!("wrote abnormal.csv / .json / .svg");
    Ok(())
}

fn cmd_almost_indep(cli: &Cli) -> CmdResult {
    let mut cfg: AlmostIndepConfig = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let provenance = Provenance::new(cfg.seed, &cfg);
    let mut nets = Vec::new();
    for (i, spec) in cfg.compacts.iter().enumerate() {
        nets.push(gef::indep::build_net(&spec.compact, cfg.a_param, spec.rho, i)?);
    }
    let mut body = String::from(
        "compact_id,lattice_points,circle_points,rho,interaction_bound,max_interaction_sum,gershgorin_margin\n",
    );
    let gram = gef::indep::coupling_gram(&nets);
    let margin = gef::indep::gershgorin_margin(&gram);
    for net in &nets {
        let mut worst: f64 = 0.0;
        for z in &net.circle_points {
            worst = worst.max(gef::indep::interaction_sum(*z, net.compact_id, &nets)?);
        }
        body.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            net.compact_id,
            net.lattice_points.len(),
            net.circle_points.len(),
            net.rho,
            gef::indep::interaction_bound(net),
            worst,
            margin
        ));
    }
    write_csv(&out_path(&cli.out, "almost_indep.csv"), &provenance, &body)?;
    if cfg.decorrelation_samples > 0 {
        let half = cfg.square_side / 2.0;
        let offset = cfg.separation / 2.0 + half;
        let s1 = gef::indep::Compact::Rect {
            x0: -offset - half,
            y0: -half,
            x1: -offset + half,
            y1: half,
        };
        let s2 = gef::indep::Compact::Rect {
            x0: offset - half,
            y0: -half,
            x1: offset + half,
            y1: half,
        };
        let rep = gef::indep::empirical_decorrelation(
            &gef::testfn::TestFunction::indicator(),
            &s1,
            &s2,
            half,
            cfg.decorrelation_samples,
            cfg.seed,
        )?;
        write_json(&out_path(&cli.out, "decorrelation.json"), &provenance, &rep)?;
    }
    println!("wrote almost_indep.csv (margin {margin:.3e})");
    Ok(())
}

fn cmd_verify(cli: &Cli) -> CmdResult {
    let mut cfg: VerifyConfig = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let provenance = Provenance::new(cfg.seed, &cfg);
    let ctx = gef::verify::VerifyContext::default();
    let ids: Vec<usize> = if cfg.criteria.is_empty() {
        (1..=gef::verify::CRITERIA_COUNT).collect()
    } else {
        cfg.criteria.clone()
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let outcome = gef::verify::run_criterion(&ctx, id, cfg.scale, cfg.seed);
        println!("{}", outcome.line());
        outcomes.push(outcome);
    }
    #[derive(Serialize)]
    struct Payload {
        scale: gef::verify::Scale,
        all_passed: bool,
        outcomes: Vec<gef::verify::CriterionOutcome>,
    }
    let all_passed = outcomes.iter().all(|o| o.pass);
    write_json(
        &out_path(&cli.out, "verify.json"),
        &provenance,
        &Payload {
            scale: cfg.scale,
            all_passed,
            outcomes: outcomes.clone(),
        },
    )?;
    if all_passed {
        println!("verify: all {} criteria passed", outcomes.len());
        Ok(())
    } else if outcomes.iter().any(|o| !o.pass && !o.statistical) {
        Err(CmdError::Numerical(
            "one or more numerical criteria failed (see verify.json)".into(),
        ))
    } else {
        Err(CmdError::Statistical(
            "one or more statistical criteria failed (see verify.json)".into(),
        ))
    }
}

fn cmd_report(cli: &Cli) -> CmdResult {
    let path = out_path(&cli.out, "verify.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CmdError::Config(format!("cannot read {}: {e}", path.display())))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CmdError::Config(e.to_string()))?;
    let outcomes = doc["outcomes"]
        .as_array()
        .ok_or_else(|| CmdError::Config("verify.json missing outcomes".into()))?;
    let mut md = String::from("# Verification report\n\n| # | criterion | verdict | detail |\n|---|-----------|---------|--------|\n");
    let mut all = true;
    for o in outcomes {
        let pass = o["pass"].as_bool().unwrap_or(false);
        all &= pass;
        md.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            o["id"],
            o["name"].as_str().unwrap_or("?"),
            if pass { "PASS" } else { "FAIL" },
            o["detail"].as_str().unwrap_or("").replace('|', "/")
        ));
    }
    md.push_str(&format!(
        "\noverall: **{}**\n",
        if all { "PASS" } else { "FAIL" }
    ));
    output::write_atomic(&out_path(&cli.out, "report.md"), md.as_bytes())?;
    println!("wrote report.md (overall: {})", if all { "PASS" } else { "FAIL" });
    Ok(())
}
