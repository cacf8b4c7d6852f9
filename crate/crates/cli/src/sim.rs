//! Plant simulation, tuning and estimator runs.

use tvgain_core::estimator::{self, lyapunov, EstimatorState, StepOptions, TheoremBounds, CONTRACTION_SLACK};
use tvgain_core::excitation::{detect, DetectOptions, ExcitationMode, ExcitationReport};
use tvgain_core::gain::{select_best, FeasibilityReport, GainParams, Hyperparameters, SelectOptions};
use tvgain_core::linalg::norm;
use tvgain_core::plant::{ParamTrajectory, Plant, RegressorSample};

use crate::baselines::{NormalizedGradient, OnlineEstimator, Rls};
use crate::config::{BaselineConfig, EstimatorKind, ExperimentConfig, HyperparameterSpec, TuningConfig};
use crate::error::CliError;
use crate::input::InputSignal;
use crate::report::Window;
use crate::trace::TraceRow;

/// Recorded plant samples with the trajectory that produced them.
#[derive(Debug, Clone)]
pub struct PlantRun {
    pub samples: Vec<RegressorSample>,
    pub trajectory: ParamTrajectory,
}

impl PlantRun {
    pub fn phis(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.phi.clone()).collect()
    }
}

/// Runs the plant for `warmup + horizon` steps and records the last
/// `horizon` samples, re-indexed from 0. `θ*_0` drives the warm-up.
pub fn simulate_plant(config: &ExperimentConfig) -> Result<PlantRun, CliError> {
    let trajectory = ParamTrajectory::new(config.trajectory.clone(), config.horizon)?;
    if trajectory.dim() != config.plant.dim() {
        return Err(CliError::Config(format!(
            "trajectory dimension {} does not match regressor dimension {}",
            trajectory.dim(),
            config.plant.dim()
        )));
    }
    let mut plant = Plant::new(config.plant.clone())?;
    let warmup = config.plant.warmup();
    let mut input = InputSignal::new(config.input.clone(), config.seed);
    let mut samples = Vec::with_capacity(config.horizon);
    for t in 0..warmup + config.horizon {
        let u = input.next().unwrap_or(0.0);
        let k = t.saturating_sub(warmup);
        let sample = plant.step(u, &trajectory.at(k)?)?;
        if t >= warmup {
            samples.push(RegressorSample { k, ..sample });
        }
    }
    Ok(PlantRun { samples, trajectory })
}

pub fn detect_options(tuning: &TuningConfig) -> DetectOptions {
    DetectOptions {
        windows: tuning.windows.clone(),
        alpha_grid: tuning.alpha_grid.clone(),
        alpha_floor: tuning.alpha_floor,
        fe_fraction: tuning.fe_fraction,
        omega_floor: tuning.omega_floor,
        start: tuning.detect_start,
    }
}

pub fn select_options(tuning: &TuningConfig) -> SelectOptions {
    SelectOptions { safety: tuning.safety, certification: tuning.certification, grid_points: tuning.grid_points }
}

/// Excitation reports to tune against: one PE report per candidate window
/// with positive level, otherwise the single FE or none verdict.
pub fn excitation_candidates(phis: &[Vec<f64>], tuning: &TuningConfig) -> Result<Vec<ExcitationReport>, CliError> {
    let opts = detect_options(tuning);
    let mut reports = Vec::new();
    for &w in &tuning.windows {
        let r = detect(phis, 0.5, &DetectOptions { windows: vec![w], ..opts.clone() })?;
        if r.mode == ExcitationMode::Persistent {
            reports.push(r);
        }
    }
    if reports.is_empty() {
        reports.push(detect(phis, 0.5, &opts)?);
    }
    Ok(reports)
}

/// Hyperparameters for a run together with the excitation they rely on.
#[derive(Debug, Clone)]
pub struct Tuned {
    pub excitation: ExcitationReport,
    pub hp: Hyperparameters,
    pub feasibility: FeasibilityReport,
    /// Where the guarantees apply; `None` when the hyperparameters are not
    /// admissible.
    pub window: Option<Window>,
}

pub fn tune(phis: &[Vec<f64>], tuning: &TuningConfig, spec: &HyperparameterSpec) -> Result<Tuned, CliError> {
    let (excitation, hp) = match spec {
        HyperparameterSpec::Auto(_) => {
            let candidates = excitation_candidates(phis, tuning)?;
            let (i, hp) = select_best(&candidates, tuning.gamma_max, &select_options(tuning))?;
            (candidates[i].at_lambda(hp.lambda_omega)?, hp)
        }
        HyperparameterSpec::Explicit(e) => {
            let params = GainParams { lambda_omega: e.lambda_omega, lambda_gamma: e.lambda_gamma, kappa: e.kappa };
            if !(e.lambda_omega > 0.0 && e.lambda_omega < 1.0) {
                return Err(CliError::Config(format!("lambda_omega = {} must lie in (0, 1)", e.lambda_omega)));
            }
            let report = detect(phis, e.lambda_omega, &detect_options(tuning))?;
            let hp = if report.mode == ExcitationMode::None {
                Hyperparameters::from_bounds(params, e.gamma_max, ExcitationMode::None, 0.0, 1.0 / e.lambda_omega)?
            } else {
                Hyperparameters::from_report(params, e.gamma_max, &report)?
            };
            (report, hp)
        }
    };
    let feasibility = hp.feasibility(tuning.certification);
    let window = if feasibility.feasible && excitation.mode != ExcitationMode::None {
        let (start, end) = excitation.certified_window();
        Some(Window { start, end })
    } else {
        None
    };
    Ok(Tuned { excitation, hp, feasibility, window })
}

/// Output of a run of the proposed estimator.
#[derive(Debug, Clone)]
pub struct ProposedRun {
    /// Rows `k = 1 ..= horizon`.
    pub rows: Vec<TraceRow>,
    /// `V_k` for `k = 0 ..= horizon`.
    pub v: Vec<f64>,
    /// `(λ_min, λ_max)` of `Γ_k` for `k = 0 ..= horizon`.
    pub gamma_spectra: Vec<(f64, f64)>,
    pub clamp_steps: usize,
    pub final_state: EstimatorState,
}

/// Row `k` holds the state after consuming sample `k − 1`; its `y`, `y_hat`
/// and `e` belong to that sample and `theta_err_norm = ‖θ_k − θ*_k‖`.
pub fn run_proposed(
    run: &PlantRun,
    hp: &Hyperparameters,
    bounds: Option<&TheoremBounds>,
    window: Option<Window>,
    tuning: &TuningConfig,
) -> Result<ProposedRun, CliError> {
    let dim = run.trajectory.dim();
    let mut state = EstimatorState::initial(dim, hp)?;
    let opts = StepOptions {
        convention: tuning.convention,
        clamp_until: if tuning.clamp { window.map(|w| w.start) } else { None },
    };
    let mu2 = bounds.map_or(0.0, |b| b.mu2);
    let theta_err = |state: &EstimatorState, k: usize| -> Result<Vec<f64>, CliError> {
        let star = run.trajectory.at(k)?;
        Ok(state.theta.iter().zip(&star).map(|(a, b)| a - b).collect())
    };
    let mut v = vec![lyapunov(&theta_err(&state, 0)?, &state.gamma_bar).unwrap_or(f64::NAN)];
    let mut gamma_spectra = vec![state.gamma.eigen_range()?];
    let mut rows = Vec::with_capacity(run.samples.len());
    let mut clamp_steps = 0;
    for sample in &run.samples {
        let out = estimator::step(&state, sample, hp, &opts)?;
        state = out.state;
        let k = state.k;
        if out.clamped {
            clamp_steps += 1;
        }
        let err = theta_err(&state, k)?;
        let v_k = lyapunov(&err, &state.gamma_bar).unwrap_or(f64::NAN);
        let v_prev = v[k - 1];
        let (gamma_eig_min, gamma_eig_max) = state.gamma.eigen_range()?;
        let (omega_eig_min, omega_eig_max) = state.omega().eigen_range()?;
        rows.push(TraceRow {
            k,
            y: sample.y,
            y_hat: out.y_hat,
            e: out.e,
            theta_err_norm: norm(&err),
            v: v_k,
            gamma_eig_min,
            gamma_eig_max,
            omega_eig_min,
            omega_eig_max,
            certified: window.is_some_and(|w| w.contains(k)),
            contracting: v_k <= (1.0 - mu2) * v_prev + CONTRACTION_SLACK * (1.0 + v_prev),
        });
        v.push(v_k);
        gamma_spectra.push((gamma_eig_min, gamma_eig_max));
    }
    Ok(ProposedRun { rows, v, gamma_spectra, clamp_steps, final_state: state })
}

/// Per-estimator tracking metrics.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EstimatorMetrics {
    pub estimator: String,
    /// Mean `‖θ̃_k‖` over the last fifth of the run.
    pub tail_error: f64,
    pub final_error: f64,
    pub gain_min_initial: f64,
    pub gain_min_final: f64,
    /// Smallest `λ_min` of the gain over the last fifth of the run.
    pub gain_min_tail: f64,
    /// `λ_min` of the gain never increased along the run.
    pub gain_min_monotone_decreasing: bool,
}

/// Runs one estimator over the recorded samples.
pub fn run_metrics(
    kind: EstimatorKind,
    run: &PlantRun,
    tuned: Option<&Tuned>,
    tuning: &TuningConfig,
    baselines: &BaselineConfig,
) -> Result<EstimatorMetrics, CliError> {
    let dim = run.trajectory.dim();
    let mut errors = Vec::with_capacity(run.samples.len());
    let mut gain_mins = Vec::with_capacity(run.samples.len() + 1);
    match kind {
        EstimatorKind::Proposed => {
            let tuned = tuned.ok_or_else(|| CliError::Config("the proposed estimator needs hyperparameters".into()))?;
            let out = run_proposed(run, &tuned.hp, None, tuned.window, tuning)?;
            gain_mins.push(out.gamma_spectra[0].0);
            for (row, spectrum) in out.rows.iter().zip(&out.gamma_spectra[1..]) {
                errors.push(row.theta_err_norm);
                gain_mins.push(spectrum.0);
            }
        }
        _ => {
            let mut est: Box<dyn OnlineEstimator> = match kind {
                EstimatorKind::BaselineRls => Box::new(Rls::new(dim, baselines.rls_p0, 1.0)),
                EstimatorKind::BaselineRlsForgetting => Box::new(Rls::new(dim, baselines.rls_p0, baselines.forgetting)),
                _ => Box::new(NormalizedGradient::new(dim, baselines.gradient_gain)),
            };
            gain_mins.push(est.gain_range()?.0);
            for sample in &run.samples {
                est.observe(sample)?;
                let star = run.trajectory.at(sample.k + 1)?;
                let err: Vec<f64> = est.theta().iter().zip(&star).map(|(a, b)| a - b).collect();
                errors.push(norm(&err));
                gain_mins.push(est.gain_range()?.0);
            }
        }
    }
    let n = errors.len();
    let tail = (n / 5).max(1);
    let tail_errors = &errors[n - tail..];
    let tail_gains = &gain_mins[gain_mins.len() - tail..];
    Ok(EstimatorMetrics {
        estimator: kind.name().to_string(),
        tail_error: tail_errors.iter().sum::<f64>() / tail as f64,
        final_error: *errors.last().unwrap_or(&f64::NAN),
        gain_min_initial: gain_mins[0],
        gain_min_final: *gain_mins.last().unwrap_or(&f64::NAN),
        gain_min_tail: tail_gains.iter().copied().fold(f64::INFINITY, f64::min),
        gain_min_monotone_decreasing: gain_mins.windows(2).all(|w| w[1] <= w[0]),
    })
}
