//! Experiment and real-data configuration files (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{FitOptions, Method, SelectorSpec};
use crate::lad::LadOptions;
use crate::simdata::ScenarioConfig;
use crate::solver::SolverOptions;

pub const SCHEMA_VERSION: u32 = 1;
pub const OUTPUT_DIR_ENV: &str = "RANKLASSO_OUTPUT_DIR";
const FALLBACK_OUTPUT_DIR: &str = "ranklasso-out";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_lad_max_iter")]
    pub lad_max_iter: usize,
}

fn default_tol() -> f64 {
    1e-7
}
fn default_max_iter() -> usize {
    100_000
}
fn default_lad_max_iter() -> usize {
    10_000
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: default_tol(),
            max_iter: default_max_iter(),
            lad_max_iter: default_lad_max_iter(),
        }
    }
}

impl SolverSettings {
    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            solver: SolverOptions {
                tol: self.tol,
                max_iter: self.max_iter,
                record_objective: false,
            },
            lad: LadOptions {
                tol: self.tol,
                max_iter: self.lad_max_iter,
                intercept: true,
                exact: true,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Config(format!("solver.tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 || self.lad_max_iter == 0 {
            return Err(Error::Config("solver iteration limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub scenarios: Vec<ScenarioConfig>,
    pub methods: Vec<SelectorSpec>,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    /// Replicate whose FD-TP curves are written out.
    #[serde(default)]
    pub fdtp_replicate: usize,
    #[serde(default)]
    pub solver: SolverSettings,
}

fn default_parallelism() -> usize {
    1
}

fn check_schema(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "schema_version {v} is not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for m in &mut cfg.methods {
            *m = m.normalized();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_config(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.scenarios.is_empty() {
            return Err(Error::Config("scenarios must not be empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be >= 1".into()));
        }
        for (k, s) in self.scenarios.iter().enumerate() {
            s.validate()
                .map_err(|e| Error::Config(format!("scenarios[{k}]: {e}")))?;
        }
        for (k, m) in self.methods.iter().enumerate() {
            m.normalized()
                .validate()
                .map_err(|e| Error::Config(format!("methods[{k}]: {e}")))?;
        }
        self.solver.validate()
    }

    pub fn output_dir(&self) -> PathBuf {
        resolve_output_dir(self.output_dir.as_deref())
    }

    /// SHA-256 of the fields that determine the outputs (everything except
    /// the output directory and the pool size).
    pub fn content_hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        c.parallelism = 1;
        hash_json(&c)
    }

    pub fn has_method(&self, m: Method) -> bool {
        self.methods.iter().any(|s| s.method == m)
    }
}

fn hash_json<T: Serialize>(v: &T) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(v).expect("config serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn resolve_output_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(FALLBACK_OUTPUT_DIR),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Screening {
    #[default]
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealDataConfig {
    pub schema_version: u32,
    pub csv_path: PathBuf,
    pub target_column: String,
    #[serde(default = "default_n_screen")]
    pub n_screen: usize,
    #[serde(default = "default_splits")]
    pub splits: usize,
    #[serde(default = "default_train_size")]
    pub train_size: usize,
    #[serde(default = "default_real_methods")]
    pub methods: Vec<SelectorSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub screening: Screening,
    /// Drop predictors whose maximum lies below this quantile of all
    /// predictor values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_below_quantile: Option<f64>,
    /// Drop predictors whose range is below this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_range: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default)]
    pub solver: SolverSettings,
}

fn default_n_screen() -> usize {
    300
}
fn default_splits() -> usize {
    200
}
fn default_train_size() -> usize {
    180
}
fn default_real_methods() -> Vec<SelectorSpec> {
    [
        Method::RankLasso,
        Method::AdaptiveRankLasso,
        Method::ThresholdedRankLasso,
        Method::LadLasso,
        Method::CvLasso,
    ]
    .into_iter()
    .map(SelectorSpec::new)
    .collect()
}

impl RealDataConfig {
    pub fn new(csv_path: impl Into<PathBuf>, target_column: impl Into<String>) -> Self {
        RealDataConfig {
            schema_version: SCHEMA_VERSION,
            csv_path: csv_path.into(),
            target_column: target_column.into(),
            n_screen: default_n_screen(),
            splits: default_splits(),
            train_size: default_train_size(),
            methods: default_real_methods(),
            seed: 0,
            screening: Screening::Pearson,
            max_below_quantile: None,
            min_range: None,
            output_dir: None,
            parallelism: 1,
            solver: SolverSettings::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: RealDataConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for m in &mut cfg.methods {
            *m = m.normalized();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_config(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        if self.n_screen == 0 {
            return Err(Error::Config("n_screen must be >= 1".into()));
        }
        if self.splits == 0 {
            return Err(Error::Config("splits must be >= 1".into()));
        }
        if self.train_size < 2 {
            return Err(Error::Config("train_size must be >= 2".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be >= 1".into()));
        }
        if let Some(q) = self.max_below_quantile {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::Config(format!(
                    "max_below_quantile must lie in [0, 1], got {q}"
                )));
            }
        }
        if let Some(r) = self.min_range {
            if !(r >= 0.0) {
                return Err(Error::Config(format!("min_range must be >= 0, got {r}")));
            }
        }
        for (k, m) in self.methods.iter().enumerate() {
            m.normalized()
                .validate()
                .map_err(|e| Error::Config(format!("methods[{k}]: {e}")))?;
        }
        self.solver.validate()
    }

    pub fn output_dir(&self) -> PathBuf {
        resolve_output_dir(self.output_dir.as_deref())
    }

    pub fn content_hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        c.parallelism = 1;
        hash_json(&c)
    }
}
