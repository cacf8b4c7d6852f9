//! Time-varying ARMA-class plants in linear-regression form.
//!
//! The plant output is `y_k = φ_kᵀ θ*_k` with
//! `φ_k = [y_{k−1}, …, y_{k−n}, u_{k−1−d}, …, u_{k−m−d}, f_1, …, f_p]`.
//! Output-lag coefficients are stored with the sign that makes this identity
//! exact: a classical `y_k = −a_1 y_{k−1} + …` model is entered as `θ*_1 = −a_1`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sin, tanh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{dot, norm};

/// Default output magnitude at which a simulation is aborted.
pub const DEFAULT_BLOWUP_GUARD: f64 = 1e9;

/// A lagged signal feeding a nonlinear basis term. `Output(i)` is `y_{k−i}`,
/// `Input(j)` is `u_{k−j−d}`; lags start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Signal {
    Output(usize),
    Input(usize),
}

/// Nonlinear basis terms `f_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum BasisFn {
    /// `s^degree`, degree 1 to 3.
    Polynomial {
        signal: Signal,
        degree: u32,
    },
    Tanh {
        signal: Signal,
    },
    Sin {
        signal: Signal,
    },
    Product {
        a: Signal,
        b: Signal,
    },
}

impl BasisFn {
    fn signals(&self) -> [Option<Signal>; 2] {
        match *self {
            BasisFn::Polynomial { signal, .. } | BasisFn::Tanh { signal } | BasisFn::Sin { signal } => {
                [Some(signal), None]
            }
            BasisFn::Product { a, b } => [Some(a), Some(b)],
        }
    }

    fn eval(&self, history: &PlantHistory, delay: usize) -> Option<f64> {
        let value = |s: Signal| history.signal(s, delay);
        Some(match *self {
            BasisFn::Polynomial { signal, degree } => {
                let s = value(signal)?;
                (0..degree).fold(1.0, |acc, _| acc * s)
            }
            BasisFn::Tanh { signal } => tanh(value(signal)?),
            BasisFn::Sin { signal } => sin(value(signal)?),
            BasisFn::Product { a, b } => value(a)? * value(b)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlantConfig {
    /// Output-lag order.
    pub n: usize,
    /// Input-lag order.
    pub m: usize,
    /// Number of nonlinear basis terms; must equal `basis.len()`.
    pub p: usize,
    /// Known input delay.
    pub d: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub basis: Vec<BasisFn>,
}

impl PlantConfig {
    pub fn linear(n: usize, m: usize, d: usize) -> Self {
        PlantConfig { n, m, p: 0, d, basis: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p != self.basis.len() {
            return Err(Error::DimensionMismatch { expected: self.p, found: self.basis.len() });
        }
        if self.dim() == 0 {
            return Err(Error::OutOfRange {
                name: "n + m + p",
                value: 0.0,
                reason: "regressor dimension must be at least 1",
            });
        }
        for f in &self.basis {
            if let BasisFn::Polynomial { degree, .. } = f {
                if !(1..=3).contains(degree) {
                    return Err(Error::OutOfRange {
                        name: "polynomial degree",
                        value: *degree as f64,
                        reason: "must be 1, 2 or 3",
                    });
                }
            }
            for s in f.signals().into_iter().flatten() {
                if matches!(s, Signal::Output(0) | Signal::Input(0)) {
                    return Err(Error::OutOfRange { name: "signal lag", value: 0.0, reason: "lags start at 1" });
                }
            }
        }
        Ok(())
    }

    /// Regressor dimension `N = n + m + p`.
    pub fn dim(&self) -> usize {
        self.n + self.m + self.p
    }

    /// Number of past outputs the regressor reads.
    pub fn outputs_needed(&self) -> usize {
        let basis = self
            .basis
            .iter()
            .flat_map(|f| f.signals())
            .flatten()
            .filter_map(|s| match s {
                Signal::Output(i) => Some(i),
                Signal::Input(_) => None,
            })
            .max()
            .unwrap_or(0);
        self.n.max(basis)
    }

    /// Number of past inputs the regressor reads (including the delay).
    pub fn inputs_needed(&self) -> usize {
        let basis = self
            .basis
            .iter()
            .flat_map(|f| f.signals())
            .flatten()
            .filter_map(|s| match s {
                Signal::Input(j) => Some(j + self.d),
                Signal::Output(_) => None,
            })
            .max()
            .unwrap_or(0);
        let linear = if self.m > 0 { self.m + self.d } else { 0 };
        linear.max(basis)
    }

    /// Steps run on zero-padded history before samples are recorded.
    pub fn warmup(&self) -> usize {
        self.outputs_needed().max(self.inputs_needed())
    }
}

/// Past outputs and inputs, most recent first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlantHistory {
    outputs: VecDeque<f64>,
    inputs: VecDeque<f64>,
}

impl PlantHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// History filled with zeros, long enough for `config`.
    pub fn zero_padded(config: &PlantConfig) -> Self {
        PlantHistory {
            outputs: VecDeque::from(vec![0.0; config.outputs_needed()]),
            inputs: VecDeque::from(vec![0.0; config.inputs_needed()]),
        }
    }

    /// From explicit lag stacks, `outputs[0] = y_{k−1}`, `inputs[0] = u_{k−1}`.
    pub fn from_lags(outputs: &[f64], inputs: &[f64]) -> Self {
        PlantHistory { outputs: outputs.iter().copied().collect(), inputs: inputs.iter().copied().collect() }
    }

    /// Record `y_k` and `u_k`, keeping at most what `config` reads.
    pub fn push(&mut self, config: &PlantConfig, y: f64, u: f64) {
        self.outputs.push_front(y);
        self.inputs.push_front(u);
        self.outputs.truncate(config.outputs_needed());
        self.inputs.truncate(config.inputs_needed());
    }

    fn signal(&self, s: Signal, delay: usize) -> Option<f64> {
        match s {
            Signal::Output(i) => self.outputs.get(i - 1).copied(),
            Signal::Input(j) => self.inputs.get(j + delay - 1).copied(),
        }
    }
}

/// One recorded step of the plant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressorSample {
    pub k: usize,
    pub phi: Vec<f64>,
    pub y: f64,
    pub u: f64,
}

/// Builds `φ_k` from the history and evaluates `y_k = φ_kᵀ θ*_k`.
///
/// `u_k` is only validated here; it enters later regressors once pushed onto
/// the history.
pub fn step_plant(
    config: &PlantConfig,
    history: &PlantHistory,
    u_k: f64,
    theta_star: &[f64],
) -> Result<(f64, Vec<f64>)> {
    if theta_star.len() != config.dim() {
        return Err(Error::DimensionMismatch { expected: config.dim(), found: theta_star.len() });
    }
    ensure_finite(&[u_k], "input")?;
    ensure_finite(theta_star, "parameter vector")?;
    if history.outputs.len() < config.outputs_needed() || history.inputs.len() < config.inputs_needed() {
        return Err(Error::InsufficientHistory {
            outputs_needed: config.outputs_needed(),
            outputs_have: history.outputs.len(),
            inputs_needed: config.inputs_needed(),
            inputs_have: history.inputs.len(),
        });
    }
    let mut phi = Vec::with_capacity(config.dim());
    phi.extend(history.outputs.iter().take(config.n));
    phi.extend(history.inputs.iter().skip(config.d).take(config.m));
    for f in &config.basis {
        // lengths were checked above, so every lag is present
        let v = f.eval(history, config.d).ok_or(Error::InsufficientHistory {
            outputs_needed: config.outputs_needed(),
            outputs_have: history.outputs.len(),
            inputs_needed: config.inputs_needed(),
            inputs_have: history.inputs.len(),
        })?;
        phi.push(v);
    }
    ensure_finite(&phi, "basis output")?;
    let y = dot(&phi, theta_star);
    Ok((y, phi))
}

/// Single-owner plant simulator over zero-padded history.
#[derive(Debug, Clone)]
pub struct Plant {
    config: PlantConfig,
    history: PlantHistory,
    guard: f64,
    k: usize,
}

impl Plant {
    pub fn new(config: PlantConfig) -> Result<Self> {
        config.validate()?;
        let history = PlantHistory::zero_padded(&config);
        Ok(Plant { config, history, guard: DEFAULT_BLOWUP_GUARD, k: 0 })
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn config(&self) -> &PlantConfig {
        &self.config
    }

    /// Index of the next step.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn in_warmup(&self) -> bool {
        self.k < self.config.warmup()
    }

    pub fn step(&mut self, u: f64, theta_star: &[f64]) -> Result<RegressorSample> {
        let (y, phi) = step_plant(&self.config, &self.history, u, theta_star)?;
        if !(fabs(y) <= self.guard) {
            return Err(Error::PlantBlowUp { k: self.k, value: y });
        }
        self.history.push(&self.config, y, u);
        let sample = RegressorSample { k: self.k, phi, y, u };
        self.k += 1;
        Ok(sample)
    }
}

/// `ŷ = φᵀθ`.
pub fn predict(phi: &[f64], theta: &[f64]) -> Result<f64> {
    if phi.len() != theta.len() {
        return Err(Error::DimensionMismatch { expected: phi.len(), found: theta.len() });
    }
    Ok(dot(phi, theta))
}

/// `e = ŷ − y`.
pub fn prediction_error(y_hat: f64, y: f64) -> f64 {
    y_hat - y
}

/// Parameter trajectory families.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum TrajectoryKind {
    Constant {
        theta: Vec<f64>,
    },
    /// `θ*_k = start + k·rate`.
    Ramp {
        start: Vec<f64>,
        rate: Vec<f64>,
    },
    /// `θ*_k = center + amplitude·sin(omega·k + phase)·direction`.
    Sinusoid {
        center: Vec<f64>,
        direction: Vec<f64>,
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// Starts at `initial`; each jump adds its vector from step `at` onwards.
    PiecewiseConstant {
        initial: Vec<f64>,
        jumps: Vec<Jump>,
    },
    /// Uniform steps of norm at most `step`, projected onto the ball of `radius`.
    RandomWalkClipped {
        start: Vec<f64>,
        step: f64,
        radius: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Jump {
    pub at: usize,
    pub delta: Vec<f64>,
}

/// A parameter trajectory over `0..=horizon` together with certified bounds
/// `‖θ*_k − θ*_{k−1}‖ ≤ delta_star` and `‖θ*_k‖ ≤ theta_star_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTrajectory {
    kind: TrajectoryKind,
    horizon: usize,
    dim: usize,
    delta_star: f64,
    theta_star_max: f64,
    path: Option<Vec<Vec<f64>>>,
}

impl ParamTrajectory {
    /// Computes the certificates in closed form and checks them at every step
    /// of the horizon.
    pub fn new(kind: TrajectoryKind, horizon: usize) -> Result<Self> {
        let (dim, delta_star, theta_star_max, path) = match &kind {
            TrajectoryKind::Constant { theta } => {
                ensure_finite(theta, "trajectory")?;
                (theta.len(), 0.0, norm(theta), None)
            }
            TrajectoryKind::Ramp { start, rate } => {
                same_len(start, rate)?;
                ensure_finite(start, "trajectory")?;
                ensure_finite(rate, "trajectory")?;
                let end: Vec<f64> = start.iter().zip(rate).map(|(s, r)| s + horizon as f64 * r).collect();
                (start.len(), norm(rate), norm(start).max(norm(&end)), None)
            }
            TrajectoryKind::Sinusoid { center, direction, amplitude, omega, phase } => {
                same_len(center, direction)?;
                ensure_finite(center, "trajectory")?;
                ensure_finite(direction, "trajectory")?;
                ensure_finite(&[*amplitude, *omega, *phase], "trajectory")?;
                let reach = fabs(*amplitude) * norm(direction);
                (center.len(), reach * 2.0 * fabs(sin(omega / 2.0)), norm(center) + reach, None)
            }
            TrajectoryKind::PiecewiseConstant { initial, jumps } => {
                ensure_finite(initial, "trajectory")?;
                for j in jumps {
                    same_len(initial, &j.delta)?;
                    ensure_finite(&j.delta, "trajectory")?;
                }
                let mut points: Vec<usize> = jumps.iter().map(|j| j.at).collect();
                points.sort_unstable();
                points.dedup();
                let mut delta_star = 0.0f64;
                let mut theta_max = norm(initial);
                let mut current = initial.clone();
                for at in points {
                    let mut step = vec![0.0; initial.len()];
                    for j in jumps.iter().filter(|j| j.at == at) {
                        for (s, d) in step.iter_mut().zip(&j.delta) {
                            *s += d;
                        }
                    }
                    // a jump at step 0 has no predecessor to differ from
                    if at > 0 {
                        delta_star = delta_star.max(norm(&step));
                    }
                    for (c, s) in current.iter_mut().zip(&step) {
                        *c += s;
                    }
                    theta_max = theta_max.max(norm(&current));
                }
                (initial.len(), delta_star, theta_max, None)
            }
            TrajectoryKind::RandomWalkClipped { start, step, radius, seed } => {
                ensure_finite(start, "trajectory")?;
                if !(*step >= 0.0) || !(*radius >= 0.0) {
                    return Err(Error::OutOfRange {
                        name: "random walk step/radius",
                        value: step.min(*radius),
                        reason: "must be non-negative",
                    });
                }
                if norm(start) > *radius {
                    return Err(Error::OutOfRange {
                        name: "random walk start norm",
                        value: norm(start),
                        reason: "must lie inside the clipping radius",
                    });
                }
                let path = random_walk(start, *step, *radius, *seed, horizon);
                (start.len(), *step, *radius, Some(path))
            }
        };
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let traj = ParamTrajectory { kind, horizon, dim, delta_star, theta_star_max, path };
        traj.check_certificates()?;
        Ok(traj)
    }

    fn check_certificates(&self) -> Result<()> {
        let slack = 4.0 * f64::EPSILON * (1.0 + self.theta_star_max);
        let mut prev: Option<Vec<f64>> = None;
        for k in 0..=self.horizon {
            let theta = self.at(k)?;
            let size = norm(&theta);
            if size > self.theta_star_max * (1.0 + 1e-12) + slack {
                return Err(Error::CertificateViolated {
                    k,
                    what: "theta_star_max",
                    value: size,
                    bound: self.theta_star_max,
                });
            }
            if let Some(p) = &prev {
                let diff: Vec<f64> = theta.iter().zip(p).map(|(a, b)| a - b).collect();
                let step = norm(&diff);
                if step > self.delta_star * (1.0 + 1e-9) + slack {
                    return Err(Error::CertificateViolated {
                        k,
                        what: "delta_star",
                        value: step,
                        bound: self.delta_star,
                    });
                }
            }
            prev = Some(theta);
        }
        Ok(())
    }

    /// `θ*_k`.
    pub fn at(&self, k: usize) -> Result<Vec<f64>> {
        if k > self.horizon {
            return Err(Error::HorizonExceeded { k, horizon: self.horizon });
        }
        Ok(match &self.kind {
            TrajectoryKind::Constant { theta } => theta.clone(),
            TrajectoryKind::Ramp { start, rate } => start.iter().zip(rate).map(|(s, r)| s + k as f64 * r).collect(),
            TrajectoryKind::Sinusoid { center, direction, amplitude, omega, phase } => {
                let s = amplitude * sin(omega * k as f64 + phase);
                center.iter().zip(direction).map(|(c, d)| c + s * d).collect()
            }
            TrajectoryKind::PiecewiseConstant { initial, jumps } => {
                let mut theta = initial.clone();
                for j in jumps.iter().filter(|j| j.at <= k) {
                    for (t, d) in theta.iter_mut().zip(&j.delta) {
                        *t += d;
                    }
                }
                theta
            }
            TrajectoryKind::RandomWalkClipped { .. } => self.path.as_ref().map(|p| p[k].clone()).unwrap_or_default(),
        })
    }

    pub fn kind(&self) -> &TrajectoryKind {
        &self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Certified bound on `‖θ*_k − θ*_{k−1}‖`.
    pub fn delta_star(&self) -> f64 {
        self.delta_star
    }

    /// Certified bound on `‖θ*_k‖`.
    pub fn theta_star_max(&self) -> f64 {
        self.theta_star_max
    }
}

/// `θ*_k` of `traj`.
pub fn gen_trajectory(traj: &ParamTrajectory, k: usize) -> Result<Vec<f64>> {
    traj.at(k)
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(())
}

fn random_walk(start: &[f64], step: f64, radius: f64, seed: u64, horizon: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = Vec::with_capacity(horizon + 1);
    let mut theta = start.to_vec();
    path.push(theta.clone());
    for _ in 0..horizon {
        let v: Vec<f64> = theta.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let scale = step / norm(&v).max(1.0);
        for (t, d) in theta.iter_mut().zip(&v) {
            *t += scale * d;
        }
        let size = norm(&theta);
        if size > radius {
            let shrink = radius / size;
            theta.iter_mut().for_each(|t| *t *= shrink);
        }
        path.push(theta.clone());
    }
    path
}
