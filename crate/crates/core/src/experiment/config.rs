use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eigen::DEFAULT_ZERO_CUTOFF;
use crate::error::{invalid, Result};
use crate::lindblad::{BathSpec, ChainModel};
use crate::rmtstats::{DEFAULT_DEGREE, DEFAULT_MARGIN, DEFAULT_TRIM};
use crate::spinops::ChainSpec;

/// Largest chain the experiment runner will attempt; bigger configurations
/// exist in the preset catalogue for reference only.
pub const MAX_RUNNABLE_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Uniform,
    /// Period-three pattern `-1, -1/2, 0`.
    Staggered,
    Custom { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub delta: f64,
    pub field: FieldSpec,
    /// Boundary coupling Γ.
    pub gamma: f64,
    pub mu: f64,
    pub mu_bar: f64,
    /// Bulk dephasing γ.
    #[serde(default)]
    pub dephasing: f64,
}

impl ModelConfig {
    pub fn build(&self) -> Result<ChainModel> {
        let chain = match &self.field {
            FieldSpec::Uniform => ChainSpec::uniform(self.n, self.delta)?,
            FieldSpec::Staggered => ChainSpec::staggered(self.n, self.delta)?,
            FieldSpec::Custom { values } => ChainSpec::new(self.n, self.delta, values.clone())?,
        };
        let bath = BathSpec::new(self.gamma, self.mu, self.mu_bar, self.dephasing)?;
        Ok(ChainModel::new(chain, bath))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Ness,
    /// The `k` leading Hermitian decay modes.
    Hdm { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnfoldingConfig {
    pub degree: usize,
    pub trim_fraction: f64,
    /// `None` picks logarithmic unfolding for steady states and raw values
    /// for decay modes.
    pub use_log: Option<bool>,
}

impl Default for UnfoldingConfig {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            trim_fraction: DEFAULT_TRIM,
            use_log: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol: f64,
    /// Budget of matrix-vector products per Krylov solve.
    pub max_iter: usize,
    pub restart: usize,
    pub check_uniqueness: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50_000,
            restart: 80,
            check_uniqueness: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HistogramConfig {
    pub bin_width: f64,
    pub s_max: f64,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        Self {
            bin_width: 0.1,
            s_max: 4.0,
        }
    }
}

fn default_zero_cutoff() -> f64 {
    DEFAULT_ZERO_CUTOFF
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

fn default_number_variance_lengths() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelConfig,
    /// Up-spin counts whose blocks are analysed and pooled.
    pub sectors: Vec<usize>,
    pub target: Target,
    #[serde(default)]
    pub unfolding: UnfoldingConfig,
    #[serde(default = "default_zero_cutoff")]
    pub zero_cutoff: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub histogram: HistogramConfig,
    #[serde(default = "default_number_variance_lengths")]
    pub number_variance_lengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.build()?;
        let n = self.model.n;
        if self.sectors.is_empty() {
            return invalid("at least one sector is required");
        }
        if let Some(&z) = self.sectors.iter().find(|&&z| z > n) {
            return invalid(format!("sector {z} outside 0..={n}"));
        }
        let mut seen = self.sectors.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.sectors.len() {
            return invalid("sectors must be distinct");
        }
        if let Target::Hdm { k } = self.target {
            if k == 0 {
                return invalid("number of decay modes must be at least 1");
            }
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.solver.tol) {
            return invalid(format!("solver tolerance must be positive, got {}", self.solver.tol));
        }
        if self.solver.max_iter == 0 || self.solver.restart == 0 {
            return invalid("solver iteration limits must be positive");
        }
        if !(self.zero_cutoff >= 0.0 && self.zero_cutoff < 1.0) {
            return invalid(format!("zero cutoff must lie in [0, 1), got {}", self.zero_cutoff));
        }
        if !(self.margin >= 0.0) {
            return invalid(format!("margin must be non-negative, got {}", self.margin));
        }
        if !positive(self.histogram.bin_width) || !positive(self.histogram.s_max) {
            return invalid("histogram bin width and range must be positive");
        }
        if self.number_variance_lengths.iter().any(|&l| !positive(l)) {
            return invalid("number-variance window lengths must be positive");
        }
        if self.unfolding.degree == 0 {
            return invalid("unfolding degree must be at least 1");
        }
        if !(0.0..=crate::rmtstats::MAX_TRIM).contains(&self.unfolding.trim_fraction) {
            return invalid(format!(
                "trim fraction must lie in [0, {}], got {}",
                crate::rmtstats::MAX_TRIM,
                self.unfolding.trim_fraction
            ));
        }
        Ok(())
    }

    /// Fails for chains beyond [`MAX_RUNNABLE_SITES`].
    pub fn check_runnable(&self) -> Result<()> {
        if self.model.n > MAX_RUNNABLE_SITES {
            return invalid(format!(
                "n = {} exceeds the largest runnable chain ({MAX_RUNNABLE_SITES} sites); use the desk-scale variant",
                self.model.n
            ));
        }
        Ok(())
    }
}
