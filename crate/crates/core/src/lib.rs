//! Adaptive parameter estimation with a self-regulating time-varying gain
//! matrix.
//!
//! The crate is `no_std` (with `alloc`). Modules, bottom up:
//!
//! * [`linalg`]: small dense symmetric matrices, Jacobi eigensolver.
//! * [`plant`]: regression plants `y_k = φ_kᵀθ*_k` and parameter trajectories.
//! * [`excitation`]: PE/FE detection and the information matrix `Ω_k`.
//! * [`gain`]: gain recursions, their bounds and the hyperparameter selector.
//! * [`estimator`]: the update law, Lyapunov monitor and decay certificates.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod estimator;
pub mod excitation;
pub mod gain;
pub mod linalg;
pub mod plant;

pub use error::{Error, Result};
pub use estimator::{
    step, theorem_bounds, verify_decay, DecayReport, EstimatorState, StepConvention, StepOptions, StepOutput,
    TheoremBounds,
};
pub use excitation::{detect, DetectOptions, ExcitationMode, ExcitationReport, OmegaState};
pub use gain::{
    select_best, select_hyperparameters, select_with, Certification, GainParams, Hyperparameters, Infeasibility,
    SelectOptions,
};
pub use linalg::{Matrix, SymMatrix};
pub use plant::{ParamTrajectory, Plant, PlantConfig, RegressorSample, TrajectoryKind};
