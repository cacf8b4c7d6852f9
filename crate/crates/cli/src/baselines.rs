//! Textbook estimators used for comparison.

use tvgain_core::linalg::{dot, SymMatrix};
use tvgain_core::plant::RegressorSample;
use tvgain_core::Result;

/// A recursive estimator consuming one sample at a time.
pub trait OnlineEstimator {
    /// Consumes a sample and returns the a-priori prediction `φᵀθ`.
    fn observe(&mut self, sample: &RegressorSample) -> Result<f64>;
    fn theta(&self) -> &[f64];
    /// `(λ_min, λ_max)` of the current gain matrix.
    fn gain_range(&self) -> Result<(f64, f64)>;
}

/// Recursive least squares with forgetting factor `λ` (`λ = 1` is plain RLS):
/// `K = Pφ/(λ + φᵀPφ)`, `θ ← θ + K(y − φᵀθ)`, `P ← (P − KφᵀP)/λ`.
#[derive(Debug, Clone)]
pub struct Rls {
    theta: Vec<f64>,
    p: SymMatrix,
    forgetting: f64,
}

impl Rls {
    pub fn new(dim: usize, p0: f64, forgetting: f64) -> Self {
        Rls { theta: vec![0.0; dim], p: SymMatrix::scaled_identity(dim, p0), forgetting }
    }
}

impl OnlineEstimator for Rls {
    fn observe(&mut self, sample: &RegressorSample) -> Result<f64> {
        let phi = &sample.phi;
        let y_hat = dot(phi, &self.theta);
        let p_phi = self.p.mul_vec(phi)?;
        let denom = self.forgetting + dot(phi, &p_phi);
        let gain: Vec<f64> = p_phi.iter().map(|v| v / denom).collect();
        let err = sample.y - y_hat;
        for (t, g) in self.theta.iter_mut().zip(&gain) {
            *t += g * err;
        }
        let correction = SymMatrix::outer(&p_phi).scale(1.0 / denom);
        self.p = self.p.sub(&correction)?.scale(1.0 / self.forgetting);
        Ok(y_hat)
    }

    fn theta(&self) -> &[f64] {
        &self.theta
    }

    fn gain_range(&self) -> Result<(f64, f64)> {
        self.p.eigen_range()
    }
}

/// `θ ← θ + μ φ (y − φᵀθ)/(1 + ‖φ‖²)`.
#[derive(Debug, Clone)]
pub struct NormalizedGradient {
    theta: Vec<f64>,
    gain: f64,
}

impl NormalizedGradient {
    pub fn new(dim: usize, gain: f64) -> Self {
        NormalizedGradient { theta: vec![0.0; dim], gain }
    }
}

impl OnlineEstimator for NormalizedGradient {
    fn observe(&mut self, sample: &RegressorSample) -> Result<f64> {
        let phi = &sample.phi;
        let y_hat = dot(phi, &self.theta);
        let s = self.gain * (sample.y - y_hat) / (1.0 + dot(phi, phi));
        for (t, p) in self.theta.iter_mut().zip(phi) {
            *t += s * p;
        }
        Ok(y_hat)
    }

    fn theta(&self) -> &[f64] {
        &self.theta
    }

    fn gain_range(&self) -> Result<(f64, f64)> {
        Ok((self.gain, self.gain))
    }
}
