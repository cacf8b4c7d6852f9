//! Experiment configuration, read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tvgain_core::estimator::StepConvention;
use tvgain_core::gain::Certification;
use tvgain_core::plant::{PlantConfig, TrajectoryKind};

use crate::error::CliError;
use crate::input::InputSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub plant: PlantConfig,
    pub trajectory: TrajectoryKind,
    pub input: InputSpec,
    /// Number of recorded samples.
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub estimator: EstimatorList,
    #[serde(default)]
    pub hyperparameters: HyperparameterSpec,
    #[serde(default)]
    pub tuning: TuningConfig,
    #[serde(default)]
    pub baselines: BaselineConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Proposed,
    BaselineRls,
    BaselineRlsForgetting,
    BaselineNormalizedGradient,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Proposed => "proposed",
            EstimatorKind::BaselineRls => "baseline-rls",
            EstimatorKind::BaselineRlsForgetting => "baseline-rls-forgetting",
            EstimatorKind::BaselineNormalizedGradient => "baseline-normalized-gradient",
        }
    }
}

/// One estimator or a list of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EstimatorList {
    One(EstimatorKind),
    Many(Vec<EstimatorKind>),
}

impl Default for EstimatorList {
    fn default() -> Self {
        EstimatorList::One(EstimatorKind::Proposed)
    }
}

impl EstimatorList {
    pub fn kinds(&self) -> Vec<EstimatorKind> {
        match self {
            EstimatorList::One(k) => vec![*k],
            EstimatorList::Many(ks) => ks.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// `"auto"` runs the selector on the measured excitation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HyperparameterSpec {
    Auto(Auto),
    Explicit(ExplicitHyperparameters),
}

impl Default for HyperparameterSpec {
    fn default() -> Self {
        HyperparameterSpec::Auto(Auto::Auto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitHyperparameters {
    pub lambda_omega: f64,
    pub lambda_gamma: f64,
    pub kappa: f64,
    pub gamma_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningConfig {
    pub gamma_max: f64,
    pub safety: f64,
    pub mu2_fraction: f64,
    pub certification: Certification,
    /// Candidate PE windows.
    pub windows: Vec<usize>,
    pub alpha_grid: Option<Vec<f64>>,
    pub alpha_floor: f64,
    pub fe_fraction: f64,
    pub omega_floor: f64,
    /// First sample considered by the excitation detector.
    pub detect_start: usize,
    pub grid_points: usize,
    /// Clamp the spectrum of `Γ_k` into the certified band until the
    /// certified window starts.
    pub clamp: bool,
    pub convention: StepConvention,
}

impl Default for TuningConfig {
    fn default() -> Self {
        TuningConfig {
            gamma_max: 1.0,
            safety: 0.5,
            mu2_fraction: 0.5,
            certification: Certification::Decay,
            windows: (1..=8).collect(),
            alpha_grid: None,
            alpha_floor: 1e-9,
            fe_fraction: 0.9,
            omega_floor: 1e-3,
            detect_start: 0,
            grid_points: 999,
            clamp: false,
            convention: StepConvention::Delayed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// `P_0 = p0·I` for both least-squares baselines.
    pub rls_p0: f64,
    pub forgetting: f64,
    pub gradient_gain: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { rls_p0: 100.0, forgetting: 0.98, gradient_gain: 0.5 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub trace: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.horizon < 1 {
            return Err(CliError::Config("horizon must be at least 1".into()));
        }
        self.plant.validate().map_err(|e| CliError::Config(format!("plant: {e}")))?;
        if self.estimator.kinds().is_empty() {
            return Err(CliError::Config("at least one estimator is required".into()));
        }
        self.input.validate()?;
        Ok(())
    }
}
