//! Excitation of regressor streams and the information matrix `Ω_k`.
//!
//! Index convention: for a stream `φ_0, φ_1, …`, `Ω_k` has absorbed the
//! samples `φ_0 … φ_{k−1}`, i.e.
//! `Ω_k = (1 − λ_Ω)^k Ω_0 + Σ_{i<k} (1 − λ_Ω)^{k−1−i} φ_iφ_iᵀ / (1 + ‖φ_i‖²)`.
//! A window starting at sample `k1` of length `ΔT` is therefore fully inside
//! `Ω_k` from `k = k1 + ΔT` on, and an interval `[k1, k2]` from `k = k2 + 1`.
//!
//! The information matrix only ever sees normalized regressors
//! `ψ = φ / √(1 + ‖φ‖²)`, so the level that bounds it from below is the
//! excitation level of `ψ`, reported alongside the raw level of `φ`.

use alloc::vec::Vec;

use libm::{floor, log, pow, sqrt};

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{dot, psd_order, sym_eigen, SymMatrix};

/// Default `Ω_0`-free tolerance used when checking `0 ⪯ Ω ⪯ Ω_max I`.
pub const OMEGA_PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaState {
    omega: SymMatrix,
    lambda_omega: f64,
    k: usize,
}

impl OmegaState {
    /// `0 < λ_Ω < 1` and `0 ⪯ Ω_0 ⪯ I` are required.
    pub fn new(omega0: SymMatrix, lambda_omega: f64) -> Result<Self> {
        check_lambda_omega(lambda_omega)?;
        let n = omega0.dim();
        if !psd_order(&SymMatrix::zeros(n), &omega0, OMEGA_PSD_TOL)? {
            return Err(Error::NotPositiveSemidefinite {
                what: "initial information matrix",
                min_eigenvalue: sym_eigen(&omega0)?.min(),
            });
        }
        if !psd_order(&omega0, &SymMatrix::identity(n), OMEGA_PSD_TOL)? {
            return Err(Error::OutOfRange {
                name: "initial information matrix",
                value: sym_eigen(&omega0)?.max(),
                reason: "must satisfy Omega_0 <= I",
            });
        }
        Ok(OmegaState { omega: omega0, lambda_omega, k: 0 })
    }

    /// `Ω_0 = I`.
    pub fn identity(dim: usize, lambda_omega: f64) -> Result<Self> {
        OmegaState::new(SymMatrix::identity(dim), lambda_omega)
    }

    pub fn omega(&self) -> &SymMatrix {
        &self.omega
    }

    pub fn lambda_omega(&self) -> f64 {
        self.lambda_omega
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `Ω_max = 1/λ_Ω`.
    pub fn omega_max(&self) -> f64 {
        1.0 / self.lambda_omega
    }
}

fn check_lambda_omega(lambda_omega: f64) -> Result<()> {
    if !(lambda_omega > 0.0 && lambda_omega < 1.0) {
        return Err(Error::OutOfRange { name: "lambda_omega", value: lambda_omega, reason: "must lie in (0, 1)" });
    }
    Ok(())
}

/// `Ω_k = (1 − λ_Ω) Ω_{k−1} + φφᵀ / (1 + ‖φ‖²)`.
pub fn update_omega(state: &OmegaState, phi: &[f64]) -> Result<OmegaState> {
    if phi.len() != state.omega.dim() {
        return Err(Error::DimensionMismatch { expected: state.omega.dim(), found: phi.len() });
    }
    ensure_finite(phi, "regressor")?;
    let omega = state.omega.scale(1.0 - state.lambda_omega).add(&normalized_outer(phi))?;
    Ok(OmegaState { omega, lambda_omega: state.lambda_omega, k: state.k + 1 })
}

/// `φ / √(1 + ‖φ‖²)`, so that `ψψᵀ = φφᵀ / (1 + ‖φ‖²)`.
pub fn normalize(phi: &[f64]) -> Vec<f64> {
    let s = 1.0 / sqrt(1.0 + dot(phi, phi));
    phi.iter().map(|v| v * s).collect()
}

/// `φφᵀ / (1 + ‖φ‖²)`, formed without the square root of [`normalize`].
pub fn normalized_outer(phi: &[f64]) -> SymMatrix {
    SymMatrix::outer(phi).scale(1.0 / (1.0 + dot(phi, phi)))
}

fn check_stream(phis: &[Vec<f64>]) -> Result<usize> {
    let dim = phis.first().map(|p| p.len()).ok_or(Error::StreamTooShort { len: 0, needed: 1 })?;
    for p in phis {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        ensure_finite(p, "regressor")?;
    }
    if dim == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(dim)
}

/// `λ_min(Σ_{i=k1}^{k2} φ_iφ_iᵀ)`, inclusive bounds.
pub fn gram_level(phis: &[Vec<f64>], k1: usize, k2: usize) -> Result<f64> {
    let dim = check_stream(phis)?;
    if k1 > k2 || k2 >= phis.len() {
        return Err(Error::InvalidInterval { k1, k2, len: phis.len() });
    }
    Ok(sym_eigen(&gram(&phis[k1..=k2], dim, false))?.min())
}

/// `Σ φφᵀ`, or `Σ φφᵀ/(1 + ‖φ‖²)` when `normalized`.
fn gram(phis: &[Vec<f64>], dim: usize, normalized: bool) -> SymMatrix {
    let mut g = alloc::vec![0.0; dim * dim];
    for p in phis {
        let w = if normalized { 1.0 / (1.0 + dot(p, p)) } else { 1.0 };
        for i in 0..dim {
            for j in 0..dim {
                g[i * dim + j] += p[i] * p[j] * w;
            }
        }
    }
    // dim ≥ 1 was checked by the caller
    SymMatrix::new(dim, g).expect("square gram matrix")
}

/// Largest `α` for which every length-`window` window of the stream has
/// `λ_min(Σ φφᵀ) ≥ α`, i.e. the minimum over windows.
pub fn measure_alpha(phis: &[Vec<f64>], window: usize) -> Result<f64> {
    window_level(phis, window, false)
}

fn window_level(phis: &[Vec<f64>], window: usize, normalized: bool) -> Result<f64> {
    let dim = check_stream(phis)?;
    if window < 1 {
        return Err(Error::OutOfRange { name: "window", value: 0.0, reason: "must be at least 1" });
    }
    if phis.len() < window {
        return Err(Error::StreamTooShort { len: phis.len(), needed: window });
    }
    let mut level = f64::INFINITY;
    for start in 0..=(phis.len() - window) {
        let l = sym_eigen(&gram(&phis[start..start + window], dim, normalized))?.min();
        level = level.min(l);
    }
    Ok(level)
}

/// Persistent excitation: every window `{s, …, s + ΔT − 1}` inside the
/// stream has `λ_min(Σ φφᵀ) ≥ alpha`.
pub fn check_pe(phis: &[Vec<f64>], window: usize, alpha: f64) -> Result<bool> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha, reason: "must be positive" });
    }
    Ok(measure_alpha(phis, window)? >= alpha)
}

/// Finite excitation over `[k1, k2]` (inclusive, `k2 ≥ k1 + 1`).
pub fn check_fe(phis: &[Vec<f64>], k1: usize, k2: usize, alpha: f64) -> Result<bool> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha, reason: "must be positive" });
    }
    if k2 < k1 + 1 || k2 >= phis.len() {
        return Err(Error::InvalidInterval { k1, k2, len: phis.len() });
    }
    Ok(gram_level(phis, k1, k2)? >= alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExcitationMode {
    #[cfg_attr(feature = "serde", serde(rename = "PE"))]
    Persistent,
    #[cfg_attr(feature = "serde", serde(rename = "FE"))]
    Finite,
    #[cfg_attr(feature = "serde", serde(rename = "none"))]
    None,
}

/// Inputs to the closed-form bounds on `Ω_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundSpec {
    /// Persistent excitation at level `alpha` over windows of length `window`.
    Persistent { window: usize, alpha: f64 },
    /// Finite excitation at level `alpha` over `[k1, k2]`, certified until `k3`.
    Finite { alpha: f64, k1: usize, k2: usize, k3: usize },
}

/// `(Ω_lower, Ω_max)`:
/// `Ω_PE = (1 − λ_Ω)^{ΔT−1} α`, `Ω_FE = α λ_Ω (1 − λ_Ω)^{k3 − k1 − 1}`,
/// `Ω_max = 1/λ_Ω`.
pub fn omega_bounds(spec: BoundSpec, lambda_omega: f64) -> Result<(f64, f64)> {
    check_lambda_omega(lambda_omega)?;
    let upper = 1.0 / lambda_omega;
    let lower = match spec {
        BoundSpec::Persistent { window, alpha } => {
            check_alpha(alpha)?;
            if window < 1 {
                return Err(Error::OutOfRange { name: "window", value: 0.0, reason: "must be at least 1" });
            }
            pow(1.0 - lambda_omega, (window - 1) as f64) * alpha
        }
        BoundSpec::Finite { alpha, k1, k2, k3 } => {
            check_alpha(alpha)?;
            if k2 < k1 + 1 || k3 <= k2 {
                return Err(Error::InvalidInterval { k1, k2: k3, len: k2 });
            }
            alpha * lambda_omega * pow(1.0 - lambda_omega, (k3 - k1 - 1) as f64)
        }
    };
    Ok((lower, upper))
}

/// The bound `α (1 − λ_Ω)^{k − k1 − 1}` on `λ_min(Ω_k)` for `k ∈ [k2 + 1, k3]`
/// after finite excitation over `[k1, k2]`.
pub fn fe_trajectory_bound(alpha: f64, lambda_omega: f64, k1: usize, k: usize) -> f64 {
    alpha * pow(1.0 - lambda_omega, k as f64 - k1 as f64 - 1.0)
}

/// Largest `k` with `α (1 − λ_Ω)^{k − k1 − 1} ≥ floor`, but never below
/// `k2 + 1`.
pub fn fe_horizon(alpha: f64, lambda_omega: f64, k1: usize, k2: usize, floor_level: f64) -> Result<usize> {
    check_lambda_omega(lambda_omega)?;
    check_alpha(alpha)?;
    if !(floor_level > 0.0) {
        return Err(Error::OutOfRange { name: "omega_floor", value: floor_level, reason: "must be positive" });
    }
    if k2 < k1 + 1 {
        return Err(Error::InvalidInterval { k1, k2, len: k2 });
    }
    let min_k = k2 + 1;
    if fe_trajectory_bound(alpha, lambda_omega, k1, min_k) < floor_level {
        return Ok(min_k);
    }
    let steps = floor(log(floor_level / alpha) / log(1.0 - lambda_omega));
    let mut k = (k1 as f64 + 1.0 + steps.max(0.0)) as usize;
    k = k.max(min_k);
    while fe_trajectory_bound(alpha, lambda_omega, k1, k + 1) >= floor_level {
        k += 1;
    }
    while k > min_k && fe_trajectory_bound(alpha, lambda_omega, k1, k) < floor_level {
        k -= 1;
    }
    Ok(k)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::OutOfRange { name: "alpha", value: alpha, reason: "must be positive" });
    }
    Ok(())
}

/// Excitation verdict for a regressor stream together with the bounds it
/// implies for `Ω_k` at a given `λ_Ω`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExcitationReport {
    pub mode: ExcitationMode,
    /// Level of the raw regressor.
    pub alpha: f64,
    /// Level of the normalized regressor; the `Ω` bounds use this one.
    pub alpha_normalized: f64,
    /// `ΔT` for PE, interval length for FE.
    pub window: usize,
    /// PE: first sample of the first window. FE: interval start.
    pub k1: usize,
    /// PE: `k1 + ΔT`. FE: interval end (inclusive).
    pub k2: usize,
    /// FE horizon.
    pub k3: Option<usize>,
    pub lambda_omega: f64,
    /// Floor used to pick the FE horizon.
    pub omega_floor: f64,
    pub omega_lower: f64,
    pub omega_upper: f64,
    /// First `Ω` index at which `omega_lower` is certified.
    pub valid_from: usize,
    /// Last certified `Ω` index; `None` means unbounded.
    pub valid_until: Option<usize>,
}

impl ExcitationReport {
    pub fn none(lambda_omega: f64) -> Self {
        ExcitationReport {
            mode: ExcitationMode::None,
            alpha: 0.0,
            alpha_normalized: 0.0,
            window: 0,
            k1: 0,
            k2: 0,
            k3: None,
            lambda_omega,
            omega_floor: 0.0,
            omega_lower: 0.0,
            omega_upper: 1.0 / lambda_omega,
            valid_from: 0,
            valid_until: None,
        }
    }

    /// PE report for windows of length `window` starting at sample `k1`.
    pub fn persistent(alpha: f64, alpha_normalized: f64, window: usize, k1: usize, lambda_omega: f64) -> Result<Self> {
        let (lower, upper) = omega_bounds(BoundSpec::Persistent { window, alpha: alpha_normalized }, lambda_omega)?;
        Ok(ExcitationReport {
            mode: ExcitationMode::Persistent,
            alpha,
            alpha_normalized,
            window,
            k1,
            k2: k1 + window,
            k3: None,
            lambda_omega,
            omega_floor: 0.0,
            omega_lower: lower,
            omega_upper: upper,
            valid_from: k1 + window,
            valid_until: None,
        })
    }

    /// FE report for `[k1, k2]`; the horizon follows from `omega_floor`.
    pub fn finite(
        alpha: f64,
        alpha_normalized: f64,
        k1: usize,
        k2: usize,
        lambda_omega: f64,
        omega_floor: f64,
    ) -> Result<Self> {
        let k3 = fe_horizon(alpha_normalized, lambda_omega, k1, k2, omega_floor)?;
        let (lower, upper) = omega_bounds(BoundSpec::Finite { alpha: alpha_normalized, k1, k2, k3 }, lambda_omega)?;
        Ok(ExcitationReport {
            mode: ExcitationMode::Finite,
            alpha,
            alpha_normalized,
            window: k2 - k1 + 1,
            k1,
            k2,
            k3: Some(k3),
            lambda_omega,
            omega_floor,
            omega_lower: lower,
            omega_upper: upper,
            valid_from: k2 + 1,
            valid_until: Some(k3),
        })
    }

    /// Same excitation re-evaluated at another `λ_Ω`.
    pub fn at_lambda(&self, lambda_omega: f64) -> Result<Self> {
        match self.mode {
            ExcitationMode::Persistent => {
                ExcitationReport::persistent(self.alpha, self.alpha_normalized, self.window, self.k1, lambda_omega)
            }
            ExcitationMode::Finite => ExcitationReport::finite(
                self.alpha,
                self.alpha_normalized,
                self.k1,
                self.k2,
                lambda_omega,
                self.omega_floor,
            ),
            ExcitationMode::None => Ok(ExcitationReport::none(lambda_omega)),
        }
    }

    /// Window `[start, end]` over which the gain and decay guarantees apply:
    /// `[k2, ∞)` for PE and `[k2, k3]` for FE.
    pub fn certified_window(&self) -> (usize, Option<usize>) {
        match self.mode {
            ExcitationMode::Persistent => (self.k2, None),
            ExcitationMode::Finite => (self.k2, self.k3),
            ExcitationMode::None => (usize::MAX, Some(0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectOptions {
    /// Candidate PE window lengths.
    pub windows: Vec<usize>,
    /// When set, reported levels are the largest grid values not above the
    /// measured ones.
    pub alpha_grid: Option<Vec<f64>>,
    /// Levels at or below this count as no excitation.
    pub alpha_floor: f64,
    /// The FE interval is the shortest one reaching this fraction of the
    /// level of the whole stream.
    pub fe_fraction: f64,
    pub omega_floor: f64,
    /// Samples before this index are ignored (transients).
    pub start: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            windows: (1..=8).collect(),
            alpha_grid: None,
            alpha_floor: 1e-9,
            fe_fraction: 0.9,
            omega_floor: 1e-3,
            start: 0,
        }
    }
}

fn quantize(level: f64, grid: Option<&[f64]>) -> f64 {
    match grid {
        None => level,
        Some(g) => g.iter().copied().filter(|a| *a > 0.0 && *a <= level).fold(0.0, f64::max),
    }
}

/// Classifies the stream and derives the `Ω` bounds at `lambda_omega`.
///
/// PE wins when some candidate window has a positive level; among windows
/// the one with the largest `Ω_PE` is kept. Otherwise the shortest interval
/// reaching `fe_fraction` of the whole-stream level is reported as FE.
pub fn detect(phis: &[Vec<f64>], lambda_omega: f64, opts: &DetectOptions) -> Result<ExcitationReport> {
    check_lambda_omega(lambda_omega)?;
    check_stream(phis)?;
    if opts.start >= phis.len() {
        return Err(Error::StreamTooShort { len: phis.len(), needed: opts.start + 1 });
    }
    let stream = &phis[opts.start..];
    let grid = opts.alpha_grid.as_deref();

    let mut best: Option<ExcitationReport> = None;
    for &window in &opts.windows {
        if window < 1 || window > stream.len() {
            continue;
        }
        let alpha_n = quantize(window_level(stream, window, true)?, grid);
        if alpha_n <= opts.alpha_floor {
            continue;
        }
        let alpha = quantize(measure_alpha(stream, window)?, grid);
        let report = ExcitationReport::persistent(alpha, alpha_n, window, opts.start, lambda_omega)?;
        if best.as_ref().is_none_or(|b| report.omega_lower > b.omega_lower) {
            best = Some(report);
        }
    }
    if let Some(report) = best {
        return Ok(report);
    }

    if stream.len() < 2 {
        return Ok(ExcitationReport::none(lambda_omega));
    }
    let Some((k1, k2)) = fe_interval(stream, opts.fe_fraction, opts.alpha_floor)? else {
        return Ok(ExcitationReport::none(lambda_omega));
    };
    let alpha_n = quantize(sym_eigen(&gram(&stream[k1..=k2], stream[0].len(), true))?.min(), grid);
    if alpha_n <= opts.alpha_floor {
        return Ok(ExcitationReport::none(lambda_omega));
    }
    let alpha = quantize(gram_level(stream, k1, k2)?, grid);
    ExcitationReport::finite(alpha, alpha_n, k1 + opts.start, k2 + opts.start, lambda_omega, opts.omega_floor)
}

/// Shortest `[k1, k2]` (latest start, then earliest end, `k2 ≥ k1 + 1`)
/// whose normalized level reaches `fraction` of the whole-stream level.
fn fe_interval(phis: &[Vec<f64>], fraction: f64, alpha_floor: f64) -> Result<Option<(usize, usize)>> {
    let dim = phis[0].len();
    let len = phis.len();
    let full = sym_eigen(&gram(phis, dim, true))?.min();
    if full <= alpha_floor {
        return Ok(None);
    }
    let target = fraction.clamp(0.0, 1.0) * full;

    let mut suffix = SymMatrix::zeros(dim);
    let mut k1 = 0;
    for s in (0..len).rev() {
        suffix = suffix.add(&normalized_outer(&phis[s]))?;
        if sym_eigen(&suffix)?.min() >= target {
            k1 = s;
            break;
        }
    }
    let k1 = k1.min(len - 2);
    let mut prefix = normalized_outer(&phis[k1]);
    let mut k2 = len - 1;
    for (e, phi) in phis.iter().enumerate().skip(k1 + 1) {
        prefix = prefix.add(&normalized_outer(phi))?;
        if sym_eigen(&prefix)?.min() >= target {
            k2 = e;
            break;
        }
    }
    Ok(Some((k1, k2)))
}
