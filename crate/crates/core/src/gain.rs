//! Time-varying gain recursions, their confinement bounds and the
//! hyperparameter selector.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{ensure_finite, Error, Result};
use crate::excitation::{ExcitationMode, ExcitationReport};
use crate::linalg::{sym_eigen, SymMatrix};

/// Slack used when checking eigenvalues against the gain bounds.
pub const GAMMA_BOUND_TOL: f64 = 1e-9;

/// `γ_k = γ_{k−1} + λ_Γ(γ_{k−1} − κ ω_k γ_{k−1}²)`.
pub fn update_gamma_scalar(gamma: f64, omega: f64, lambda_gamma: f64, kappa: f64) -> Result<f64> {
    ensure_finite(&[gamma, omega, lambda_gamma, kappa], "scalar gain update")?;
    if !(gamma > 0.0) {
        return Err(Error::OutOfRange { name: "gamma", value: gamma, reason: "must be positive" });
    }
    Ok(gamma + lambda_gamma * (gamma - kappa * omega * gamma * gamma))
}

/// `Γ_k = Γ_{k−1} + λ_Γ(Γ_{k−1} − κ Γ_{k−1} Ω_k Γ_{k−1})`, symmetrized.
///
/// Fails with [`Error::Degenerate`] when the result is not positive
/// definite, which only happens for misconfigured hyperparameters.
pub fn update_gamma(gamma: &SymMatrix, omega: &SymMatrix, lambda_gamma: f64, kappa: f64) -> Result<SymMatrix> {
    if gamma.dim() != omega.dim() {
        return Err(Error::DimensionMismatch { expected: gamma.dim(), found: omega.dim() });
    }
    ensure_finite(&[lambda_gamma, kappa], "gain hyperparameters")?;
    let quad = gamma.congruence(omega)?;
    let next = gamma.scale(1.0 + lambda_gamma).sub(&quad.scale(lambda_gamma * kappa))?;
    if !next.is_finite() {
        return Err(Error::NonFinite { what: "gain matrix" });
    }
    let spectrum = sym_eigen(&next)?;
    if spectrum.min() <= 0.0 {
        return Err(Error::Degenerate { spectrum: spectrum.eigenvalues });
    }
    Ok(next)
}

/// A violated constraint: it requires `lower < upper` (or `≤` for the
/// inclusive ones) and the values say otherwise.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Infeasibility {
    pub constraint: String,
    pub lower: f64,
    pub upper: f64,
}

impl Infeasibility {
    fn new(constraint: &str, lower: f64, upper: f64) -> Self {
        Infeasibility { constraint: constraint.to_string(), lower, upper }
    }
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails ({} vs {})", self.constraint, self.lower, self.upper)
    }
}

/// Bounds of the scalar recursion driven by `ω_k ∈ [ω_min, ω_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalarGainBounds {
    pub gamma_max: f64,
    pub gamma_min: f64,
    pub kappa: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    /// Where the parabola vertex `(1 + λ_Γ)/(2λ_Γκω)` meets `γ_max`.
    pub omega_star: f64,
    pub lambda_gamma: f64,
}

/// Upper limit on `λ_Γ` from the spread of `ω` (infinite when `ω_max ≤ ω_min`).
fn spread_limit(omega_min: f64, omega_max: f64) -> f64 {
    let ratio = omega_max / omega_min;
    if ratio <= 1.0 {
        f64::INFINITY
    } else {
        1.0 / (ratio - 1.0)
    }
}

/// `κ_min = 1/(γ_max ω_min)`, `κ_max = (1 + λ_Γ)/(λ_Γ ω_max γ_max)` and, for
/// the chosen `κ` (midpoint of `[κ_min, κ_max)` when `None`),
/// `γ_min = min{1/(κω_max), γ_max + λ_Γ(γ_max − κω_maxγ_max²)}`.
pub fn scalar_bounds(
    gamma_max: f64,
    lambda_gamma: f64,
    omega_min: f64,
    omega_max: f64,
    kappa: Option<f64>,
) -> Result<ScalarGainBounds> {
    ensure_finite(&[gamma_max, lambda_gamma, omega_min, omega_max], "scalar bounds")?;
    if !(gamma_max > 0.0) {
        return Err(Error::OutOfRange { name: "gamma_max", value: gamma_max, reason: "must be positive" });
    }
    if !(omega_min > 0.0 && omega_min <= omega_max) {
        return Err(Error::OutOfRange {
            name: "omega_min",
            value: omega_min,
            reason: "need 0 < omega_min <= omega_max",
        });
    }
    let limit = spread_limit(omega_min, omega_max).min(1.0);
    if !(lambda_gamma > 0.0 && lambda_gamma < limit) {
        return Err(
            Infeasibility::new("0 < lambda_gamma < min{1/(omega_max/omega_min - 1), 1}", lambda_gamma, limit).into()
        );
    }
    let kappa_min = 1.0 / (gamma_max * omega_min);
    let kappa_max = (1.0 + lambda_gamma) / (lambda_gamma * omega_max * gamma_max);
    if kappa_min >= kappa_max {
        return Err(Infeasibility::new("kappa_min < kappa_max", kappa_min, kappa_max).into());
    }
    let kappa = kappa.unwrap_or(0.5 * (kappa_min + kappa_max));
    if !(kappa >= kappa_min && kappa < kappa_max) {
        return Err(Error::OutOfRange { name: "kappa", value: kappa, reason: "must lie in [kappa_min, kappa_max)" });
    }
    let gamma_min = (1.0 / (kappa * omega_max))
        .min(gamma_max + lambda_gamma * (gamma_max - kappa * omega_max * gamma_max * gamma_max));
    let omega_star = (1.0 + lambda_gamma) / (2.0 * lambda_gamma * kappa * gamma_max);
    Ok(ScalarGainBounds {
        gamma_max,
        gamma_min,
        kappa,
        kappa_min,
        kappa_max,
        omega_min,
        omega_max,
        omega_star,
        lambda_gamma,
    })
}

/// The three rates driving one estimator step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GainParams {
    pub lambda_omega: f64,
    pub lambda_gamma: f64,
    pub kappa: f64,
}

/// How much the hyperparameters are asked to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Certification {
    /// Exponential decay of the Lyapunov function (gain bounds included).
    Decay,
    /// Confinement of the gain matrix only.
    GainBounds,
}

/// Hyperparameters together with the bounds they were derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hyperparameters {
    pub lambda_omega: f64,
    pub lambda_gamma: f64,
    pub kappa: f64,
    pub gamma_max: f64,
    pub mode: ExcitationMode,
    /// `Ω_PE` or `Ω_FE`.
    pub omega_lower: f64,
    /// `Ω_max = 1/λ_Ω`.
    pub omega_upper: f64,
    /// `Γ_PE` or `Γ_FE`.
    pub gamma_lower: f64,
}

/// One line of a feasibility report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstraintCheck {
    pub constraint: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub value: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeasibilityReport {
    pub certification: Certification,
    pub constraints: Vec<ConstraintCheck>,
    pub feasible: bool,
}

/// The `κ` interval for given rates and `Ω` bounds.
pub fn kappa_interval(
    lambda_omega: f64,
    lambda_gamma: f64,
    gamma_max: f64,
    omega_lower: f64,
    omega_upper: f64,
    certification: Certification,
) -> (f64, f64) {
    let kappa_min = 1.0 / (gamma_max * omega_lower);
    let first = (1.0 + lambda_gamma) / (lambda_gamma * omega_upper * gamma_max);
    let kappa_max = match certification {
        Certification::GainBounds => first,
        Certification::Decay => {
            first.min(1.0 / (lambda_gamma * gamma_max)).min(1.0 / ((1.0 - lambda_omega) * omega_upper * gamma_max))
        }
    };
    (kappa_min, kappa_max)
}

/// Upper limit on `λ_Γ`.
pub fn lambda_gamma_limit(omega_lower: f64, omega_upper: f64, certification: Certification) -> f64 {
    let limit = spread_limit(omega_lower, omega_upper).min(1.0);
    match certification {
        Certification::GainBounds => limit,
        Certification::Decay => limit.min(omega_lower),
    }
}

/// `min{1/(κΩ_max), Γ_max + λ_Γ(Γ_max − κΩ_maxΓ_max²)}`.
pub fn gamma_lower_bound(kappa: f64, lambda_gamma: f64, gamma_max: f64, omega_upper: f64) -> f64 {
    (1.0 / (kappa * omega_upper))
        .min(gamma_max + lambda_gamma * (gamma_max - kappa * omega_upper * gamma_max * gamma_max))
}

impl Hyperparameters {
    /// Derives the `Ω` and `Γ` bounds for explicit rates.
    pub fn from_bounds(
        params: GainParams,
        gamma_max: f64,
        mode: ExcitationMode,
        omega_lower: f64,
        omega_upper: f64,
    ) -> Result<Self> {
        ensure_finite(&[params.lambda_omega, params.lambda_gamma, params.kappa, gamma_max], "hyperparameters")?;
        if !(gamma_max > 0.0) {
            return Err(Error::OutOfRange { name: "gamma_max", value: gamma_max, reason: "must be positive" });
        }
        if !(params.kappa > 0.0) {
            return Err(Error::OutOfRange { name: "kappa", value: params.kappa, reason: "must be positive" });
        }
        let gamma_lower = gamma_lower_bound(params.kappa, params.lambda_gamma, gamma_max, omega_upper);
        Ok(Hyperparameters {
            lambda_omega: params.lambda_omega,
            lambda_gamma: params.lambda_gamma,
            kappa: params.kappa,
            gamma_max,
            mode,
            omega_lower,
            omega_upper,
            gamma_lower,
        })
    }

    /// Explicit rates evaluated against a measured excitation.
    pub fn from_report(params: GainParams, gamma_max: f64, report: &ExcitationReport) -> Result<Self> {
        if report.mode == ExcitationMode::None {
            return Err(Error::NoExcitation);
        }
        let r = report.at_lambda(params.lambda_omega)?;
        Hyperparameters::from_bounds(params, gamma_max, r.mode, r.omega_lower, r.omega_upper)
    }

    pub fn params(&self) -> GainParams {
        GainParams { lambda_omega: self.lambda_omega, lambda_gamma: self.lambda_gamma, kappa: self.kappa }
    }

    /// Every condition required by `certification`, each with its verdict.
    pub fn feasibility(&self, certification: Certification) -> FeasibilityReport {
        let mut constraints = Vec::new();
        let mut push = |constraint: &str, lower: Option<f64>, upper: Option<f64>, value: f64, satisfied: bool| {
            // unbounded limits are reported as absent
            let lower = lower.filter(|x| x.is_finite());
            let upper = upper.filter(|x| x.is_finite());
            constraints.push(ConstraintCheck { constraint: constraint.to_string(), lower, upper, value, satisfied });
        };
        let lo = self.omega_lower;
        let hi = self.omega_upper;
        push(
            "0 < lambda_omega < 1",
            Some(0.0),
            Some(1.0),
            self.lambda_omega,
            self.lambda_omega > 0.0 && self.lambda_omega < 1.0,
        );
        push("omega_lower > 0", Some(0.0), None, lo, lo > 0.0);
        if certification == Certification::Decay {
            let bound = 1.0 / (lo + 1.0);
            push("lambda_omega > 1/(omega_lower + 1)", Some(bound), None, self.lambda_omega, self.lambda_omega > bound);
        }
        let limit = lambda_gamma_limit(lo, hi, certification);
        push(
            "0 < lambda_gamma < limit",
            Some(0.0),
            Some(limit),
            self.lambda_gamma,
            self.lambda_gamma > 0.0 && self.lambda_gamma < limit,
        );
        let (kmin, kmax) = kappa_interval(self.lambda_omega, self.lambda_gamma, self.gamma_max, lo, hi, certification);
        push(
            "kappa_min <= kappa < kappa_max",
            Some(kmin),
            Some(kmax),
            self.kappa,
            self.kappa >= kmin && self.kappa < kmax,
        );
        push("gamma_lower > 0", Some(0.0), None, self.gamma_lower, self.gamma_lower > 0.0);
        let feasible = constraints.iter().all(|c| c.satisfied);
        FeasibilityReport { certification, constraints, feasible }
    }

    /// First violated condition, if any.
    pub fn validate(&self, certification: Certification) -> core::result::Result<(), Infeasibility> {
        let report = self.feasibility(certification);
        match report.constraints.into_iter().find(|c| !c.satisfied) {
            None => Ok(()),
            Some(c) => {
                let (lower, upper) = match (c.lower, c.upper) {
                    (Some(l), Some(_)) if c.value < l => (l, c.value),
                    (_, Some(u)) => (c.value, u),
                    (Some(l), None) => (l, c.value),
                    (None, None) => (c.value, c.value),
                };
                Err(Infeasibility { constraint: c.constraint, lower, upper })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectOptions {
    /// Relative position inside each open interval, in `(0, 1)`.
    pub safety: f64,
    pub certification: Certification,
    /// `λ_Ω` is scanned over `i/(grid_points + 1)`.
    pub grid_points: usize,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions { safety: 0.5, certification: Certification::Decay, grid_points: 999 }
    }
}

/// Picks `λ_Ω, λ_Γ, κ` for a measured excitation with default options and
/// the given `safety`.
pub fn select_hyperparameters(report: &ExcitationReport, gamma_max: f64, safety: f64) -> Result<Hyperparameters> {
    select_with(report, gamma_max, &SelectOptions { safety, ..SelectOptions::default() })
}

/// Grid scan over `λ_Ω`. At each grid point `λ_Γ` and `κ` sit at `safety`
/// inside their intervals; the feasible point with the best objective wins.
/// The objective is the decay rate `μ₁` for [`Certification::Decay`] and
/// `Γ_lower/Γ_max` for [`Certification::GainBounds`].
///
/// When no grid point is feasible the violation from the grid point that got
/// furthest through the constraint chain is returned.
pub fn select_with(report: &ExcitationReport, gamma_max: f64, opts: &SelectOptions) -> Result<Hyperparameters> {
    if report.mode == ExcitationMode::None {
        return Err(Error::NoExcitation);
    }
    if !(gamma_max > 0.0) || !gamma_max.is_finite() {
        return Err(Error::OutOfRange { name: "gamma_max", value: gamma_max, reason: "must be positive" });
    }
    if !(opts.safety > 0.0 && opts.safety < 1.0) {
        return Err(Error::OutOfRange { name: "safety", value: opts.safety, reason: "must lie in (0, 1)" });
    }
    if opts.grid_points == 0 {
        return Err(Error::OutOfRange { name: "grid_points", value: 0.0, reason: "must be at least 1" });
    }
    let mut best: Option<(f64, Hyperparameters)> = None;
    let mut deepest: Option<(u8, Infeasibility)> = None;
    for i in 1..=opts.grid_points {
        let lambda_omega = i as f64 / (opts.grid_points + 1) as f64;
        let r = report.at_lambda(lambda_omega)?;
        match candidate(&r, gamma_max, opts) {
            Ok((score, hp)) => {
                if best.as_ref().is_none_or(|(s, _)| score > *s) {
                    best = Some((score, hp));
                }
            }
            Err((stage, inf)) => {
                if deepest.as_ref().is_none_or(|(s, _)| stage > *s) {
                    deepest = Some((stage, inf));
                }
            }
        }
    }
    match (best, deepest) {
        (Some((_, hp)), _) => Ok(hp),
        (None, Some((_, inf))) => Err(Error::Infeasible(inf)),
        (None, None) => unreachable!("grid is non-empty"),
    }
}

/// Runs [`select_with`] on each report and keeps the best-scoring result
/// (see [`select_with`] for the objective). Returns the index of the winning
/// report. Fails with the error of the first report when none is feasible.
pub fn select_best(
    reports: &[ExcitationReport],
    gamma_max: f64,
    opts: &SelectOptions,
) -> Result<(usize, Hyperparameters)> {
    let mut best: Option<(f64, usize, Hyperparameters)> = None;
    let mut first_err = None;
    for (i, report) in reports.iter().enumerate() {
        match select_with(report, gamma_max, opts) {
            Ok(hp) => {
                let score = selection_score(&hp, opts.certification).unwrap_or(f64::NEG_INFINITY);
                if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                    best = Some((score, i, hp));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some((_, i, hp)), _) => Ok((i, hp)),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::NoExcitation),
    }
}

/// Objective maximized by the selector.
pub fn selection_score(hp: &Hyperparameters, certification: Certification) -> Result<f64> {
    match certification {
        Certification::GainBounds => Ok(hp.gamma_lower / hp.gamma_max),
        Certification::Decay => Ok(crate::estimator::theorem_bounds(hp, 0.0, 0.0, 0.5)?.mu1),
    }
}

fn candidate(
    r: &ExcitationReport,
    gamma_max: f64,
    opts: &SelectOptions,
) -> core::result::Result<(f64, Hyperparameters), (u8, Infeasibility)> {
    let lo = r.omega_lower;
    let hi = r.omega_upper;
    let lambda_omega = r.lambda_omega;
    if !(lo > 0.0) {
        return Err((0, Infeasibility::new("omega_lower > 0", 0.0, lo)));
    }
    if opts.certification == Certification::Decay {
        let bound = 1.0 / (lo + 1.0);
        if !(lambda_omega > bound) {
            return Err((1, Infeasibility::new("lambda_omega > 1/(omega_lower + 1)", bound, lambda_omega)));
        }
    }
    let lambda_gamma = opts.safety * lambda_gamma_limit(lo, hi, opts.certification);
    let (kmin, kmax) = kappa_interval(lambda_omega, lambda_gamma, gamma_max, lo, hi, opts.certification);
    if !(kmin < kmax) {
        return Err((2, Infeasibility::new("kappa_min < kappa_max", kmin, kmax)));
    }
    let kappa = kmin + opts.safety * (kmax - kmin);
    let params = GainParams { lambda_omega, lambda_gamma, kappa };
    let hp = Hyperparameters::from_bounds(params, gamma_max, r.mode, lo, hi)
        .map_err(|_| (3, Infeasibility::new("finite hyperparameters", 0.0, 0.0)))?;
    if !(hp.gamma_lower > 0.0) {
        return Err((3, Infeasibility::new("gamma_lower > 0", 0.0, hp.gamma_lower)));
    }
    if let Err(inf) = hp.validate(opts.certification) {
        return Err((4, inf));
    }
    let score = match selection_score(&hp, opts.certification) {
        Ok(score) => score,
        Err(Error::Infeasible(inf)) => return Err((5, inf)),
        Err(_) => return Err((5, Infeasibility::new("theorem constants", 0.0, 0.0))),
    };
    Ok((score, hp))
}

/// Verdict of the gain-bound check at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GammaVerdict {
    Certified { lower_ok: bool, upper_ok: bool },
    Uncertified,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GammaBoundReport {
    /// Indexed by step `k` of the trace.
    pub verdicts: Vec<GammaVerdict>,
    pub checked: usize,
    pub lower_violations: Vec<usize>,
    pub upper_violations: Vec<usize>,
    pub ok: bool,
}

/// Checks `Γ_lower I ⪯ Γ_k ⪯ Γ_max I` (with [`GAMMA_BOUND_TOL`] slack) for
/// `k` inside the inclusive window; `gammas[k]` is `Γ_k`.
pub fn gamma_bound_check(
    gammas: &[SymMatrix],
    hp: &Hyperparameters,
    window: (usize, Option<usize>),
) -> Result<GammaBoundReport> {
    let spectra = gammas.iter().map(|g| g.eigen_range()).collect::<Result<Vec<_>>>()?;
    Ok(gamma_bound_check_spectra(&spectra, hp, window))
}

/// [`gamma_bound_check`] on precomputed `(λ_min, λ_max)` pairs.
pub fn gamma_bound_check_spectra(
    spectra: &[(f64, f64)],
    hp: &Hyperparameters,
    window: (usize, Option<usize>),
) -> GammaBoundReport {
    let (start, end) = window;
    let mut verdicts = Vec::with_capacity(spectra.len());
    let mut lower_violations = Vec::new();
    let mut upper_violations = Vec::new();
    let mut checked = 0;
    for (k, &(lo, hi)) in spectra.iter().enumerate() {
        if k < start || end.is_some_and(|e| k > e) {
            verdicts.push(GammaVerdict::Uncertified);
            continue;
        }
        checked += 1;
        let lower_ok = lo >= hp.gamma_lower - GAMMA_BOUND_TOL;
        let upper_ok = hi <= hp.gamma_max + GAMMA_BOUND_TOL;
        if !lower_ok {
            lower_violations.push(k);
        }
        if !upper_ok {
            upper_violations.push(k);
        }
        verdicts.push(GammaVerdict::Certified { lower_ok, upper_ok });
    }
    let ok = lower_violations.is_empty() && upper_violations.is_empty();
    GammaBoundReport { verdicts, checked, lower_violations, upper_violations, ok }
}
