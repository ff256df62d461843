use std::path::{Path, PathBuf};

use damix::data::GeneratorSpec;
use damix::diagnostics::VerifySpec;
use damix::models::{Glm, ModelKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// The default experiment definition shipped with the binary.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn burn_in() -> f64 {
    0.2
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Everything one `damix` invocation needs; each subcommand reads its own
/// section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "one")]
    pub c_convention: f64,
    /// Worker threads for sweeps; the rayon default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, rename = "gen-data", skip_serializing_if = "Option::is_none")]
    pub gen_data: Option<GenDataConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
}

/// Where a dataset comes from: a CSV file or the synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Declared entry bound `M` for CSV data; the observed maximum if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

/// Gaussian prior `N(0, scale·I)` for probit/logit, or the lasso prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub xi: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self { scale: 1.0, lambda: 1.0, alpha: 1.0, xi: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub model: ModelKind,
    pub iters: usize,
    #[serde(default = "half")]
    pub zeta: f64,
    #[serde(default)]
    pub prior: PriorConfig,
    pub data: DataConfig,
}

/// Inputs of every bound evaluator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub n: usize,
    pub d: usize,
    pub m: f64,
    pub b1: f64,
    /// Smallest prior-precision eigenvalue bound; `b1` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    pub eta_log: f64,
    pub eps: f64,
    /// Covariance norm bound `S` of the independent-data bounds.
    #[serde(default = "one")]
    pub s: f64,
    /// Sub-Gaussian scale `K`.
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "delta")]
    pub delta: f64,
}

fn delta() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub iters: usize,
    pub overlap_instances: usize,
    pub tv_pairs: usize,
}

impl VerifyConfig {
    pub fn spec(&self, seed: u64) -> VerifySpec {
        VerifySpec { seed, iters: self.iters, overlap_instances: self.overlap_instances, tv_pairs: self.tv_pairs }
    }
}

/// A scaling sweep over bounded iid designs with entries in `[−m, m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: Glm,
    pub n_grid: Vec<usize>,
    pub d_grid: Vec<usize>,
    pub replicates: usize,
    pub iters: usize,
    #[serde(default = "burn_in")]
    pub burn_in_frac: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default = "one")]
    pub prior_scale: f64,
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default = "bootstrap")]
    pub bootstrap: usize,
    #[serde(default = "one")]
    pub m: f64,
    /// Scale of the true coefficients, `β ~ N(0, beta_scale²/d·I)`.
    #[serde(default = "one")]
    pub beta_scale: f64,
}

fn bootstrap() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenDataConfig {
    pub generator: GeneratorSpec,
}

/// DA against LMC and MALA on one probit/logit posterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub model: Glm,
    pub iters: usize,
    #[serde(default = "burn_in")]
    pub burn_in_frac: f64,
    #[serde(default = "one")]
    pub prior_scale: f64,
    /// LMC step; `0.1/L′` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmc_step: Option<f64>,
    /// MALA step; `1/L′` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mala_step: Option<f64>,
    pub data: DataConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Self::parse(DEFAULT_CONFIG, "default config"),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text, &p.display().to_string())
            }
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
    }

    /// SHA-256 of the canonical serialization, lowercase hex.
    pub fn hash(&self) -> Result<String, CliError> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Field checks that serde cannot express.
    pub fn check(&self) -> Result<(), CliError> {
        if self.seed > i64::MAX as u64 {
            return Err(CliError::Config(format!("seed {} exceeds {}", self.seed, i64::MAX)));
        }
        if !(self.c_convention > 0.0 && self.c_convention.is_finite()) {
            return Err(CliError::Config(format!("c_convention = {} must be positive", self.c_convention)));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        for data in [self.sample.as_ref().map(|s| &s.data), self.compare.as_ref().map(|c| &c.data)].into_iter().flatten() {
            if data.csv.is_some() == data.generator.is_some() {
                return Err(CliError::Config("a data section needs exactly one of `csv` or `generator`".into()));
            }
        }
        Ok(())
    }
}
