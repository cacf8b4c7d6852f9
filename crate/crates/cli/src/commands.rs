//! The five subcommands as library functions.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tvgain_core::estimator::{theorem_bounds, verify_decay, DecayReport, TheoremBounds};
use tvgain_core::excitation::{detect, ExcitationMode, ExcitationReport};
use tvgain_core::gain::{
    gamma_bound_check_spectra, kappa_interval, lambda_gamma_limit, select_with, Certification, FeasibilityReport,
    GainParams, Hyperparameters,
};

use crate::config::{EstimatorKind, ExperimentConfig};
use crate::error::CliError;
use crate::report::{GammaBoundSummary, RunReport};
use crate::sim::{self, EstimatorMetrics, PlantRun, ProposedRun, Tuned};
use crate::trace::{self, TraceRow};

/// Everything produced by [`simulate`].
#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub run: PlantRun,
    pub tuned: Tuned,
    pub proposed: ProposedRun,
    pub report: RunReport,
    pub trace_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

impl SimulateOutcome {
    pub fn rows(&self) -> &[TraceRow] {
        &self.proposed.rows
    }
}

/// Output locations: `<out>/trace.csv` and `<out>/report.json` when `out` is
/// given, otherwise the paths from the config.
pub fn output_paths(config: &ExperimentConfig, out: Option<&Path>) -> (Option<PathBuf>, Option<PathBuf>) {
    match out {
        Some(dir) => (Some(dir.join("trace.csv")), Some(dir.join("report.json"))),
        None => (config.output.trace.clone(), config.output.report.clone()),
    }
}

/// Simulates the plant, tunes, runs the proposed estimator, verifies the
/// certificates and writes the trace and report.
pub fn simulate(config: &ExperimentConfig, out: Option<&Path>) -> Result<SimulateOutcome, CliError> {
    config.validate()?;
    let run = sim::simulate_plant(config)?;
    let tuned = sim::tune(&run.phis(), &config.tuning, &config.hyperparameters)?;
    let bounds = certified_bounds(&tuned, &run, config)?;
    let proposed = sim::run_proposed(&run, &tuned.hp, bounds.as_ref(), tuned.window, &config.tuning)?;
    if proposed.clamp_steps > 0 {
        eprintln!("note: gain spectrum clamped on {} step(s) before the certified window", proposed.clamp_steps);
    }
    let decay = match (bounds.as_ref(), tuned.window) {
        (Some(b), Some(w)) => Some(verify_decay(&proposed.v, b, w.as_pair())),
        _ => None,
    };
    let gamma_bounds = tuned
        .window
        .map(|w| GammaBoundSummary::from(&gamma_bound_check_spectra(&proposed.gamma_spectra, &tuned.hp, w.as_pair())));
    let report = RunReport {
        horizon: config.horizon,
        seed: config.seed,
        excitation: tuned.excitation.clone(),
        hyperparameters: tuned.hp,
        feasibility: tuned.feasibility.clone(),
        theorem_bounds: bounds,
        certified_window: tuned.window,
        tail_sup_v: decay.as_ref().and_then(|d| d.entered_set_at.map(|_| d.tail_sup)),
        decay,
        gamma_bounds,
        clamp_steps: proposed.clamp_steps,
        final_theta_err_norm: proposed.rows.last().map_or(f64::NAN, |r| r.theta_err_norm),
    };
    let (trace_path, report_path) = output_paths(config, out);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    if let Some(p) = &trace_path {
        trace::write(p, &proposed.rows)?;
    }
    if let Some(p) = &report_path {
        report.write(p)?;
    }
    Ok(SimulateOutcome { run, tuned, proposed, report, trace_path, report_path })
}

/// Decay constants when the run is certified for decay.
fn certified_bounds(
    tuned: &Tuned,
    run: &PlantRun,
    config: &ExperimentConfig,
) -> Result<Option<TheoremBounds>, CliError> {
    if tuned.window.is_none() || config.tuning.certification != Certification::Decay {
        return Ok(None);
    }
    let b = theorem_bounds(
        &tuned.hp,
        run.trajectory.delta_star(),
        run.trajectory.theta_star_max(),
        config.tuning.mu2_fraction,
    )?;
    Ok(Some(b))
}

/// Regressors from a CSV file with one regressor per line; a header line
/// that does not parse as numbers is skipped.
pub fn read_regressors(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut phis = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => phis.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(CliError::Parse { what: "regressor file", detail: format!("line {}: {e}", i + 1) }),
        }
    }
    Ok(phis)
}

/// Classifies a regressor stream.
pub fn detect_stream(
    phis: &[Vec<f64>],
    config: &crate::config::TuningConfig,
    lambda_omega: f64,
) -> Result<ExcitationReport, CliError> {
    Ok(detect(phis, lambda_omega, &sim::detect_options(config))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutput {
    pub hyperparameters: Hyperparameters,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub feasibility: FeasibilityReport,
    pub theorem_bounds: Option<TheoremBounds>,
}

/// Rates the user may pin; the rest are placed at `safety` inside their
/// intervals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FixedRates {
    pub lambda_omega: Option<f64>,
    pub lambda_gamma: Option<f64>,
    pub kappa: Option<f64>,
}

pub fn tune_report(
    report: &ExcitationReport,
    gamma_max: f64,
    safety: f64,
    certification: Certification,
    fixed: FixedRates,
) -> Result<TuneOutput, CliError> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(CliError::Config(format!("safety = {safety} must lie strictly inside (0, 1)")));
    }
    if report.mode == ExcitationMode::None {
        return Err(tvgain_core::Error::NoExcitation.into());
    }
    let hp = match fixed.lambda_omega {
        None => {
            if fixed.lambda_gamma.is_some() || fixed.kappa.is_some() {
                return Err(CliError::Config(
                    "lambda_gamma or kappa can only be fixed together with lambda_omega".into(),
                ));
            }
            let opts = tvgain_core::gain::SelectOptions { safety, certification, ..Default::default() };
            select_with(report, gamma_max, &opts)?
        }
        Some(lambda_omega) => {
            if !(lambda_omega > 0.0 && lambda_omega < 1.0) {
                return Err(CliError::Config(format!("lambda_omega = {lambda_omega} must lie in (0, 1)")));
            }
            let r = report.at_lambda(lambda_omega)?;
            let lambda_gamma = fixed
                .lambda_gamma
                .unwrap_or_else(|| safety * lambda_gamma_limit(r.omega_lower, r.omega_upper, certification));
            let (kmin, kmax) =
                kappa_interval(lambda_omega, lambda_gamma, gamma_max, r.omega_lower, r.omega_upper, certification);
            let kappa = fixed.kappa.unwrap_or(kmin + safety * (kmax - kmin));
            Hyperparameters::from_report(GainParams { lambda_omega, lambda_gamma, kappa }, gamma_max, &r)?
        }
    };
    let (kappa_min, kappa_max) =
        kappa_interval(hp.lambda_omega, hp.lambda_gamma, hp.gamma_max, hp.omega_lower, hp.omega_upper, certification);
    let feasibility = hp.feasibility(certification);
    let bounds = if feasibility.feasible && certification == Certification::Decay {
        theorem_bounds(&hp, 0.0, 0.0, 0.5).ok()
    } else {
        None
    };
    Ok(TuneOutput { hyperparameters: hp, kappa_min, kappa_max, feasibility, theorem_bounds: bounds })
}

/// Re-checks a trace against the bounds and window stored in its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub decay: Option<DecayReport>,
    pub gamma_bounds: Option<GammaBoundSummary>,
    pub ok: bool,
}

pub fn verify(rows: &[TraceRow], report: &RunReport) -> VerifyOutput {
    let Some(window) = report.certified_window else {
        return VerifyOutput { decay: None, gamma_bounds: None, ok: true };
    };
    // rows start at k = 1; slot 0 is never inside a window
    let len = rows.iter().map(|r| r.k).max().map_or(1, |k| k + 1);
    let mut v = vec![f64::NAN; len];
    let mut spectra = vec![(f64::NAN, f64::NAN); len];
    for r in rows {
        v[r.k] = r.v;
        spectra[r.k] = (r.gamma_eig_min, r.gamma_eig_max);
    }
    let decay = report.theorem_bounds.as_ref().map(|b| verify_decay(&v, b, window.as_pair()));
    let gamma =
        GammaBoundSummary::from(&gamma_bound_check_spectra(&spectra, &report.hyperparameters, window.as_pair()));
    let ok = decay.as_ref().is_none_or(|d| d.ok) && gamma.ok;
    VerifyOutput { decay, gamma_bounds: Some(gamma), ok }
}

/// Runs every listed estimator on the same recorded samples.
pub fn compare(config: &ExperimentConfig) -> Result<Vec<EstimatorMetrics>, CliError> {
    config.validate()?;
    let kinds = config.estimator.kinds();
    if kinds.len() < 2 {
        return Err(CliError::Config("compare needs at least two estimators".into()));
    }
    let run = sim::simulate_plant(config)?;
    let tuned = if kinds.contains(&EstimatorKind::Proposed) {
        Some(sim::tune(&run.phis(), &config.tuning, &config.hyperparameters)?)
    } else {
        None
    };
    kinds
        .into_iter()
        .map(|kind| sim::run_metrics(kind, &run, tuned.as_ref(), &config.tuning, &config.baselines))
        .collect()
}

pub fn metrics_table(metrics: &[EstimatorMetrics]) -> String {
    let mut out = String::from(
        "estimator,tail_error,final_error,gain_min_initial,gain_min_final,gain_min_tail,gain_min_monotone_decreasing\n",
    );
    for m in metrics {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            m.estimator,
            m.tail_error,
            m.final_error,
            m.gain_min_initial,
            m.gain_min_final,
            m.gain_min_tail,
            u8::from(m.gain_min_monotone_decreasing)
        ));
    }
    out
}
