//! Experiment configurations: JSON records with rejected unknown keys and
//! explicit defaults, resolved once and echoed into output provenance.

use serde::{Deserialize, Serialize};

fn default_seed() -> u64 {
    gef::verify::DEFAULT_MASTER_SEED
}
fn default_tail_tol() -> f64 {
    1e-10
}
fn default_tol() -> f64 {
    1e-7
}
fn default_count() -> usize {
    4
}
fn default_radius() -> f64 {
    6.0
}
fn default_function() -> String {
    "indicator".into()
}
fn default_r_list() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}
fn default_ensemble() -> usize {
    400
}
fn default_alpha() -> f64 {
    0.5
}
fn default_a_param() -> f64 {
    5.0
}
fn default_residual_tol() -> f64 {
    gef::zeros::DEFAULT_RESIDUAL_TOL
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    pub valid_radius: f64,
    pub tail_tolerance: f64,
    /// Also extract and emit zeros within this radius (0 disables).
    pub zeros_radius: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: default_seed(),
            count: default_count(),
            valid_radius: default_radius(),
            tail_tolerance: default_tail_tol(),
            zeros_radius: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZerosConfig {
    pub seed: u64,
    pub count: usize,
    pub radius: f64,
    pub residual_tol: f64,
}

impl Default for ZerosConfig {
    fn default() -> Self {
        ZerosConfig {
            seed: default_seed(),
            count: default_count(),
            radius: default_radius(),
            residual_tol: default_residual_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VarianceConfig {
    pub function: String,
    pub r_list: Vec<f64>,
    pub tol: f64,
    /// Monte Carlo cross-check column ensemble size (0 disables).
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for VarianceConfig {
    fn default() -> Self {
        VarianceConfig {
            function: default_function(),
            r_list: default_r_list(),
            tol: default_tol(),
            mc_samples: 0,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairCorrelationConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
    pub tol: f64,
}

impl Default for PairCorrelationConfig {
    fn default() -> Self {
        PairCorrelationConfig {
            r_min: 0.05,
            r_max: 4.0,
            step: 0.05,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalityProbe {
    Clt,
    LogMinus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormalityConfig {
    pub probe: NormalityProbe,
    pub function: String,
    pub r_list: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for NormalityConfig {
    fn default() -> Self {
        NormalityConfig {
            probe: NormalityProbe::Clt,
            function: "smooth-bump".into(),
            r_list: vec![4.0, 8.0],
            n_samples: default_ensemble(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AbnormalConfig {
    pub alpha: f64,
    pub r_list: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for AbnormalConfig {
    fn default() -> Self {
        AbnormalConfig {
            alpha: default_alpha(),
            r_list: vec![4.0, 8.0],
            n_samples: default_ensemble(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactSpec {
    #[serde(flatten)]
    pub compact: gef::indep::Compact,
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlmostIndepConfig {
    pub a_param: f64,
    pub compacts: Vec<CompactSpec>,
    /// Decorrelation probe: two squares of the given side separated by the
    /// given gap (0 samples disables).
    pub decorrelation_samples: usize,
    pub square_side: f64,
    pub separation: f64,
    pub seed: u64,
}

impl Default for AlmostIndepConfig {
    fn default() -> Self {
        AlmostIndepConfig {
            a_param: default_a_param(),
            compacts: vec![
                CompactSpec {
                    compact: gef::indep::Compact::Rect {
                        x0: 0.0,
                        y0: 0.0,
                        x1: 1.0,
                        y1: 1.0,
                    },
                    rho: 1.3,
                },
                CompactSpec {
                    compact: gef::indep::Compact::Rect {
                        x0: 16.0,
                        y0: 0.0,
                        x1: 17.0,
                        y1: 1.0,
                    },
                    rho: 1.3,
                },
            ],
            decorrelation_samples: 400,
            square_side: 2.0,
            separation: 8.0,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub scale: gef::verify::Scale,
    pub seed: u64,
    /// Run only these criteria (empty = all).
    pub criteria: Vec<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            scale: gef::verify::Scale::Full,
            seed: default_seed(),
            criteria: Vec::new(),
        }
    }
}

/// Loads a config of type `T` from an optional JSON file, resolving defaults.
pub fn load<T: Default + serde::de::DeserializeOwned>(
    path: Option<&std::path::Path>,
) -> Result<T, String> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("config schema error: {e}"))
        }
    }
}
