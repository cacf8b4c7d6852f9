//! The parameter update law, the `Γ = Γ̄ + Υ` decomposition, the Lyapunov
//! function and the decay certificates.
//!
//! One call to [`step`] consumes a sample `(φ, y)` and advances the state
//! from index `k − 1` to `k`. With the default [`StepConvention::Delayed`]:
//!
//! ```text
//! e    = φᵀθ_{k−1} − y
//! Γ̄_k  = Γ_{k−1} − λ_Γκ Γ_{k−1} ψψᵀ Γ_{k−1}          ψ = φ/√(1+‖φ‖²)
//! Υ_k  = λ_Γ Γ_{k−1} − λ_Γκ(1−λ_Ω) Γ_{k−1} Ω_{k−1} Γ_{k−1}
//! Ω_k  = (1−λ_Ω) Ω_{k−1} + ψψᵀ
//! Γ_k  = Γ_{k−1} + λ_Γ(Γ_{k−1} − κ Γ_{k−1} Ω_k Γ_{k−1})  = Γ̄_k + Υ_k
//! θ_k  = θ_{k−1} − λ_Γκ Γ_{k−1} φ e / (1+‖φ‖²)
//! ```
//!
//! so that `θ̃_k = Γ̄_k Γ_{k−1}^{-1} θ̃_{k−1} + (θ*_{k−1} − θ*_k)` and the
//! Lyapunov function `V_k = θ̃_kᵀ Γ̄_k^{-1} θ̃_k` contracts outside the
//! compact set `{V ≤ v_bound}`.

use alloc::vec::Vec;

use libm::{pow, sqrt};

use crate::error::{ensure_finite, Error, Result};
use crate::excitation::{update_omega, ExcitationMode, OmegaState};
use crate::gain::{update_gamma, Hyperparameters, Infeasibility};
use crate::linalg::{dot, SymMatrix};
use crate::plant::RegressorSample;

/// Relative slack of the per-step contraction check.
pub const CONTRACTION_SLACK: f64 = 1e-12;

/// Which regressor and gain enter each update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StepConvention {
    /// `θ` moves with the pre-update gain; `Γ̄_k` uses the regressor that
    /// enters `Ω_k`. The decomposition `Γ_k = Γ̄_k + Υ_k` is exact.
    #[default]
    Delayed,
    /// `θ` moves with the post-update gain and `Γ̄_k` uses the previous
    /// regressor. Kept for comparison; the decomposition does not hold.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepOptions {
    pub convention: StepConvention,
    /// When set, the eigenvalues of `Γ_k` are clamped into
    /// `[Γ_lower, Γ_max]` for every `k ≤ clamp_until`.
    pub clamp_until: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    pub theta: Vec<f64>,
    pub gamma: SymMatrix,
    pub omega_state: OmegaState,
    pub gamma_bar: SymMatrix,
    pub upsilon: SymMatrix,
    pub k: usize,
    pub last_phi: Vec<f64>,
}

impl EstimatorState {
    /// State at `k = 0` with `Γ̄_0 = Γ_0` and `Υ_0 = 0`.
    pub fn new(theta0: Vec<f64>, gamma0: SymMatrix, omega_state: OmegaState) -> Result<Self> {
        let n = gamma0.dim();
        if theta0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: theta0.len() });
        }
        if omega_state.omega().dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: omega_state.omega().dim() });
        }
        ensure_finite(&theta0, "initial estimate")?;
        let min = gamma0.eigen()?.min();
        if !(min > 0.0) {
            return Err(Error::NotPositiveSemidefinite { what: "initial gain matrix", min_eigenvalue: min });
        }
        Ok(EstimatorState {
            theta: theta0,
            gamma_bar: gamma0.clone(),
            upsilon: SymMatrix::zeros(n),
            gamma: gamma0,
            omega_state,
            k: 0,
            last_phi: alloc::vec![0.0; n],
        })
    }

    /// `θ_0 = 0`, `Γ_0 = Γ_max I`, `Ω_0 = I`.
    pub fn initial(dim: usize, hp: &Hyperparameters) -> Result<Self> {
        EstimatorState::new(
            alloc::vec![0.0; dim],
            SymMatrix::scaled_identity(dim, hp.gamma_max),
            OmegaState::identity(dim, hp.lambda_omega)?,
        )
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn omega(&self) -> &SymMatrix {
        self.omega_state.omega()
    }
}

/// `θ − λ_Γκ Γ φ e / (1 + ‖φ‖²)`.
pub fn update_theta(
    theta: &[f64],
    gamma: &SymMatrix,
    phi: &[f64],
    e: f64,
    lambda_gamma: f64,
    kappa: f64,
) -> Result<Vec<f64>> {
    let n = gamma.dim();
    for len in [theta.len(), phi.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    ensure_finite(theta, "estimate")?;
    ensure_finite(phi, "regressor")?;
    ensure_finite(&[e, lambda_gamma, kappa], "update gains")?;
    let s = lambda_gamma * kappa * e / (1.0 + dot(phi, phi));
    let g = gamma.mul_vec(phi)?;
    Ok(theta.iter().zip(g).map(|(t, gi)| t - s * gi).collect())
}

/// `Γ̄ = Γ_prev − λ_Γκ Γ_prev φφᵀ Γ_prev / (1 + ‖φ‖²)`.
pub fn compute_gamma_bar(gamma_prev: &SymMatrix, phi: &[f64], lambda_gamma: f64, kappa: f64) -> Result<SymMatrix> {
    if phi.len() != gamma_prev.dim() {
        return Err(Error::DimensionMismatch { expected: gamma_prev.dim(), found: phi.len() });
    }
    ensure_finite(phi, "regressor")?;
    let s = lambda_gamma * kappa / (1.0 + dot(phi, phi));
    gamma_prev.sub(&gamma_prev.outer_congruence(phi)?.scale(s))
}

/// `Υ = λ_Γ Γ_prev − λ_Γκ(1 − λ_Ω) Γ_prev Ω_prev Γ_prev`.
pub fn compute_upsilon(
    gamma_prev: &SymMatrix,
    omega_prev: &SymMatrix,
    lambda_gamma: f64,
    kappa: f64,
    lambda_omega: f64,
) -> Result<SymMatrix> {
    let quad = gamma_prev.congruence(omega_prev)?;
    gamma_prev.scale(lambda_gamma).sub(&quad.scale(lambda_gamma * kappa * (1.0 - lambda_omega)))
}

/// `Ψ = Γ̄⁻¹ Υ^{1/2} (I + Υ^{1/2} Γ̄⁻¹ Υ^{1/2})⁻¹ Υ^{1/2} Γ̄⁻¹`, so that
/// `(Γ̄ + Υ)⁻¹ = Γ̄⁻¹ − Ψ`.
pub fn compute_psi(gamma_bar: &SymMatrix, upsilon: &SymMatrix) -> Result<SymMatrix> {
    let n = gamma_bar.dim();
    let gbi = gamma_bar.inverse("gamma_bar")?;
    let root = upsilon.sqrt_psd("upsilon")?;
    let inner = SymMatrix::identity(n).add(&root.congruence(&gbi)?)?;
    let middle = root.congruence(&inner.inverse("I + upsilon^1/2 gamma_bar^-1 upsilon^1/2")?)?;
    gbi.congruence(&middle)
}

/// `V = θ̃ᵀ Γ̄⁻¹ θ̃`.
pub fn lyapunov(theta_tilde: &[f64], gamma_bar: &SymMatrix) -> Result<f64> {
    if theta_tilde.len() != gamma_bar.dim() {
        return Err(Error::DimensionMismatch { expected: gamma_bar.dim(), found: theta_tilde.len() });
    }
    ensure_finite(theta_tilde, "parameter error")?;
    let v = gamma_bar.inverse("gamma_bar")?.quad_form(theta_tilde)?;
    Ok(v.max(0.0))
}

/// Constants of the decay certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoremBounds {
    pub gamma_bar_min: f64,
    pub gamma_bar_max: f64,
    pub upsilon_min: f64,
    pub upsilon_max: f64,
    pub psi_min: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub c1: f64,
    pub c2: f64,
    /// Radius of the compact set `{V ≤ v_bound}`, quadratic-root form.
    pub v_bound: f64,
    /// `2Δ*θ*_max` times the squared root factor.
    pub v_bound_alt: f64,
    pub delta_star: f64,
    pub theta_star_max: f64,
    pub mode: ExcitationMode,
}

/// Evaluates the constant chain for `hp`:
/// `Γ̄_min = min{Γ_max − λ_ΓκΓ_max², Γ_l − λ_ΓκΓ_l²}`, `Γ̄_max = Γ_max`,
/// `Υ_min = min_{γ∈{Γ_max, Γ_l}} λ_Γγ(1 − κ(1−λ_Ω)Ω_maxγ)`,
/// `Ψ_min = Υ_min / ((1 + λ_ΓΓ_max/Γ̄_min) Γ_max²)`, `μ₁ = Ψ_minΓ̄_min`,
/// `c₁ = Γ̄_max^{1/2}/Γ̄_min`, `c₂ = 1/Γ̄_min` and
/// `v_bound = [Δ*(c₁ + √(c₁² + 4c₂(μ₁−μ₂)))/(2(μ₁−μ₂))]²`.
pub fn theorem_bounds(
    hp: &Hyperparameters,
    delta_star: f64,
    theta_star_max: f64,
    mu2_fraction: f64,
) -> Result<TheoremBounds> {
    ensure_finite(&[delta_star, theta_star_max, mu2_fraction], "theorem inputs")?;
    if !(mu2_fraction > 0.0 && mu2_fraction < 1.0) {
        return Err(Error::OutOfRange { name: "mu2_fraction", value: mu2_fraction, reason: "must lie in (0, 1)" });
    }
    if delta_star < 0.0 || theta_star_max < 0.0 {
        return Err(Error::OutOfRange { name: "delta_star", value: delta_star, reason: "must be non-negative" });
    }
    let lg = hp.lambda_gamma;
    let kappa = hp.kappa;
    let gmax = hp.gamma_max;
    let gl = hp.gamma_lower;
    if !(gl > 0.0) {
        return Err(Infeasibility { constraint: "gamma_lower > 0".into(), lower: 0.0, upper: gl }.into());
    }
    let gamma_bar_min = (gmax - lg * kappa * gmax * gmax).min(gl - lg * kappa * gl * gl);
    if !(gamma_bar_min > 0.0) {
        return Err(Infeasibility {
            constraint: "kappa < 1/(lambda_gamma gamma_max)".into(),
            lower: kappa,
            upper: 1.0 / (lg * gmax),
        }
        .into());
    }
    let gamma_bar_max = gmax;
    let upsilon_at = |g: f64| lg * g * (1.0 - kappa * (1.0 - hp.lambda_omega) * hp.omega_upper * g);
    let upsilon_min = upsilon_at(gmax).min(upsilon_at(gl));
    if !(upsilon_min > 0.0) {
        return Err(Infeasibility {
            constraint: "kappa < 1/((1 - lambda_omega) omega_max gamma_max)".into(),
            lower: kappa,
            upper: 1.0 / ((1.0 - hp.lambda_omega) * hp.omega_upper * gmax),
        }
        .into());
    }
    let upsilon_max = lg * gmax;
    let psi_min = upsilon_min / ((1.0 + lg * gmax / gamma_bar_min) * gmax * gmax);
    let mu1 = psi_min * gamma_bar_min;
    if !(mu1 > 0.0 && mu1 < 1.0) {
        return Err(Error::OutOfRange { name: "mu1", value: mu1, reason: "must lie in (0, 1)" });
    }
    let mu2 = mu2_fraction * mu1;
    let c1 = sqrt(gamma_bar_max) / gamma_bar_min;
    let c2 = 1.0 / gamma_bar_min;
    let gap = mu1 - mu2;
    let root = (c1 + sqrt(c1 * c1 + 4.0 * c2 * gap)) / (2.0 * gap);
    let v_bound = pow(delta_star * root, 2.0);
    let v_bound_alt = 2.0 * delta_star * theta_star_max * root * root;
    Ok(TheoremBounds {
        gamma_bar_min,
        gamma_bar_max,
        upsilon_min,
        upsilon_max,
        psi_min,
        mu1,
        mu2,
        c1,
        c2,
        v_bound,
        v_bound_alt,
        delta_star,
        theta_star_max,
        mode: hp.mode,
    })
}

/// Result of one [`step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub state: EstimatorState,
    pub y_hat: f64,
    pub e: f64,
    /// The spectral clamp changed `Γ_k`.
    pub clamped: bool,
}

/// Advances the estimator by one sample.
pub fn step(
    state: &EstimatorState,
    sample: &RegressorSample,
    hp: &Hyperparameters,
    opts: &StepOptions,
) -> Result<StepOutput> {
    let phi = &sample.phi;
    let n = state.dim();
    if phi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phi.len() });
    }
    ensure_finite(phi, "regressor")?;
    ensure_finite(&[sample.y], "output")?;
    let (lo, lg, kappa) = (hp.lambda_omega, hp.lambda_gamma, hp.kappa);
    if (state.omega_state.lambda_omega() - lo).abs() > 0.0 {
        return Err(Error::OutOfRange {
            name: "lambda_omega",
            value: lo,
            reason: "differs from the rate the information matrix was built with",
        });
    }
    let y_hat = dot(phi, &state.theta);
    let e = y_hat - sample.y;
    let k = state.k + 1;

    let upsilon = compute_upsilon(&state.gamma, state.omega(), lg, kappa, lo)?;
    let omega_state = update_omega(&state.omega_state, phi)?;
    let (gamma_bar, gamma, theta) = match opts.convention {
        StepConvention::Delayed => {
            let gamma_bar = compute_gamma_bar(&state.gamma, phi, lg, kappa)?;
            let gamma = update_gamma(&state.gamma, omega_state.omega(), lg, kappa)?;
            let theta = update_theta(&state.theta, &state.gamma, phi, e, lg, kappa)?;
            (gamma_bar, gamma, theta)
        }
        StepConvention::Literal => {
            let gamma_bar = compute_gamma_bar(&state.gamma, &state.last_phi, lg, kappa)?;
            let gamma = update_gamma(&state.gamma, omega_state.omega(), lg, kappa)?;
            let theta = update_theta(&state.theta, &gamma, phi, e, lg, kappa)?;
            (gamma_bar, gamma, theta)
        }
    };

    let (gamma, clamped) = match opts.clamp_until {
        Some(until) if k <= until => clamp_spectrum(gamma, hp.gamma_lower, hp.gamma_max)?,
        _ => (gamma, false),
    };

    Ok(StepOutput {
        state: EstimatorState { theta, gamma, omega_state, gamma_bar, upsilon, k, last_phi: phi.clone() },
        y_hat,
        e,
        clamped,
    })
}

/// Projects the eigenvalues of `gamma` into `[lower, upper]`.
pub fn clamp_spectrum(gamma: SymMatrix, lower: f64, upper: f64) -> Result<(SymMatrix, bool)> {
    let spectrum = gamma.eigen()?;
    if spectrum.min() >= lower && spectrum.max() <= upper {
        return Ok((gamma, false));
    }
    Ok((spectrum.map(|x| x.clamp(lower, upper)), true))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayViolation {
    pub k: usize,
    pub v_prev: f64,
    pub v: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    pub window_start: usize,
    pub window_end: Option<usize>,
    /// Steps inside the window with `V_{k−1} > v_bound`.
    pub steps_checked: usize,
    /// Steps inside the window with `V_{k−1} ≤ v_bound`.
    pub steps_exempt: usize,
    pub steps_uncertified: usize,
    pub violations: Vec<DecayViolation>,
    /// Steps where `V_k` exceeded `(1−μ₂)^{k−start} V_start` before the
    /// trajectory first entered the compact set.
    pub envelope_violations: Vec<usize>,
    /// Largest `V_k / ((1−μ₂)^{k−start} V_start)` over the envelope phase.
    pub envelope_ratio: f64,
    /// First `k` in the window with `V_k ≤ v_bound`.
    pub entered_set_at: Option<usize>,
    /// Largest `V_k` after entering the compact set.
    pub tail_sup: f64,
    pub tail_bound: f64,
    pub ok: bool,
}

/// Checks the decay certificate on `values[k] = V_k` over the inclusive
/// window: the step form `V_k ≤ (1−μ₂)V_{k−1}` whenever `V_{k−1} > v_bound`,
/// the exponential envelope from the window start and, once inside the
/// compact set, `V_k ≤ v_bound/(1−μ₂)`.
pub fn verify_decay(values: &[f64], bounds: &TheoremBounds, window: (usize, Option<usize>)) -> DecayReport {
    let (start, end) = window;
    let rate = 1.0 - bounds.mu2;
    let last = values.len().saturating_sub(1);
    let stop = end.map_or(last, |e| e.min(last));
    let mut report = DecayReport {
        window_start: start,
        window_end: end,
        steps_checked: 0,
        steps_exempt: 0,
        steps_uncertified: 0,
        violations: Vec::new(),
        envelope_violations: Vec::new(),
        envelope_ratio: 0.0,
        entered_set_at: None,
        tail_sup: 0.0,
        tail_bound: bounds.v_bound / rate,
        ok: true,
    };
    if values.is_empty() {
        return report;
    }
    report.steps_uncertified = (1..values.len()).filter(|&k| k <= start || k > stop).count();
    if start >= values.len() {
        return report;
    }

    let v_start = values[start];
    if v_start <= bounds.v_bound {
        report.entered_set_at = Some(start);
        report.tail_sup = v_start;
    }
    for k in (start + 1)..=stop {
        let (v_prev, v) = (values[k - 1], values[k]);
        if v_prev > bounds.v_bound {
            report.steps_checked += 1;
            let bound = rate * v_prev;
            if v > bound + CONTRACTION_SLACK * (1.0 + v_prev) {
                report.violations.push(DecayViolation { k, v_prev, v, bound });
            }
        } else {
            report.steps_exempt += 1;
        }
        if report.entered_set_at.is_none() {
            let envelope = pow(rate, (k - start) as f64) * v_start;
            if envelope > 0.0 {
                report.envelope_ratio = report.envelope_ratio.max(v / envelope);
            }
            if v > envelope + CONTRACTION_SLACK * (1.0 + v_start) {
                report.envelope_violations.push(k);
            }
            if v <= bounds.v_bound {
                report.entered_set_at = Some(k);
            }
        }
        if report.entered_set_at.is_some() {
            report.tail_sup = report.tail_sup.max(v);
        }
    }
    report.ok = report.violations.is_empty()
        && report.envelope_violations.is_empty()
        && report.tail_sup <= report.tail_bound * (1.0 + CONTRACTION_SLACK) + CONTRACTION_SLACK;
    report
}
