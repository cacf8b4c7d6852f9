//! JSON run report.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tvgain_core::estimator::{DecayReport, TheoremBounds};
use tvgain_core::excitation::ExcitationReport;
use tvgain_core::gain::{FeasibilityReport, GammaBoundReport, Hyperparameters};

use crate::error::CliError;

/// Inclusive window of steps; `end = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: Option<usize>,
}

impl Window {
    pub fn contains(&self, k: usize) -> bool {
        k >= self.start && self.end.is_none_or(|e| k <= e)
    }

    pub fn as_pair(&self) -> (usize, Option<usize>) {
        (self.start, self.end)
    }
}

/// Aggregate of the gain-bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaBoundSummary {
    pub checked: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    pub first_violation: Option<usize>,
    pub ok: bool,
}

impl From<&GammaBoundReport> for GammaBoundSummary {
    fn from(r: &GammaBoundReport) -> Self {
        let first = r.lower_violations.iter().chain(&r.upper_violations).min().copied();
        GammaBoundSummary {
            checked: r.checked,
            lower_violations: r.lower_violations.len(),
            upper_violations: r.upper_violations.len(),
            first_violation: first,
            ok: r.ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub horizon: usize,
    pub seed: u64,
    pub excitation: ExcitationReport,
    pub hyperparameters: Hyperparameters,
    pub feasibility: FeasibilityReport,
    pub theorem_bounds: Option<TheoremBounds>,
    /// Steps covered by the guarantees; absent when nothing is certified.
    pub certified_window: Option<Window>,
    pub decay: Option<DecayReport>,
    pub gamma_bounds: Option<GammaBoundSummary>,
    /// Number of steps where the spectral clamp changed `Γ_k`.
    pub clamp_steps: usize,
    pub final_theta_err_norm: f64,
    /// Largest `V_k` after the trajectory first entered `{V ≤ v_bound}`.
    pub tail_sup_v: Option<f64>,
}

impl RunReport {
    pub fn verified(&self) -> bool {
        self.decay.as_ref().is_none_or(|d| d.ok) && self.gamma_bounds.as_ref().is_none_or(|g| g.ok)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Parse { what: "report", detail: e.to_string() })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse { what: "report", detail: e.to_string() })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunReport::from_json(&text)
    }
}
