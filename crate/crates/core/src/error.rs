use alloc::vec::Vec;
use core::fmt;

use crate::gain::Infeasibility;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input contained NaN or an infinity.
    NonFinite {
        what: &'static str,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    NotSquare {
        rows: usize,
        cols: usize,
    },
    EmptyMatrix,
    /// A matrix that must be inverted is singular or too badly conditioned.
    Singular {
        factor: &'static str,
        condition: f64,
    },
    NotPositiveSemidefinite {
        what: &'static str,
        min_eigenvalue: f64,
    },
    /// The gain matrix lost positive definiteness; carries its spectrum.
    Degenerate {
        spectrum: Vec<f64>,
    },
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    InsufficientHistory {
        outputs_needed: usize,
        outputs_have: usize,
        inputs_needed: usize,
        inputs_have: usize,
    },
    /// Plant output exceeded the blow-up guard (the BIBO assumption failed).
    PlantBlowUp {
        k: usize,
        value: f64,
    },
    HorizonExceeded {
        k: usize,
        horizon: usize,
    },
    CertificateViolated {
        k: usize,
        what: &'static str,
        value: f64,
        bound: f64,
    },
    InvalidInterval {
        k1: usize,
        k2: usize,
        len: usize,
    },
    StreamTooShort {
        len: usize,
        needed: usize,
    },
    /// No excitation was found in the regressor stream.
    NoExcitation,
    Infeasible(Infeasibility),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is not square ({rows}x{cols})"),
            Error::EmptyMatrix => write!(f, "matrix dimension must be at least 1"),
            Error::Singular { factor, condition } => {
                write!(f, "{factor} is singular or ill-conditioned (condition estimate {condition:e})")
            }
            Error::NotPositiveSemidefinite { what, min_eigenvalue } => {
                write!(f, "{what} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")
            }
            Error::Degenerate { spectrum } => {
                write!(f, "gain matrix lost positive definiteness, spectrum {spectrum:?}")
            }
            Error::OutOfRange { name, value, reason } => {
                write!(f, "{name} = {value} out of range: {reason}")
            }
            Error::InsufficientHistory { outputs_needed, outputs_have, inputs_needed, inputs_have } => write!(
                f,
                "insufficient history: need {outputs_needed} outputs / {inputs_needed} inputs, have {outputs_have} / {inputs_have}"
            ),
            Error::PlantBlowUp { k, value } => {
                write!(f, "plant output {value:e} at step {k} exceeded the blow-up guard")
            }
            Error::HorizonExceeded { k, horizon } => {
                write!(f, "step {k} is beyond the trajectory horizon {horizon}")
            }
            Error::CertificateViolated { k, what, value, bound } => {
                write!(f, "trajectory certificate {what} violated at step {k}: {value} > {bound}")
            }
            Error::InvalidInterval { k1, k2, len } => {
                write!(f, "interval [{k1}, {k2}] invalid for a stream of length {len}")
            }
            Error::StreamTooShort { len, needed } => {
                write!(f, "regressor stream too short: {len} samples, need {needed}")
            }
            Error::NoExcitation => write!(
                f,
                "regressor is neither persistently nor finitely exciting; estimation without excitation needs a projection extension, which is not provided"
            ),
            Error::Infeasible(inf) => write!(f, "infeasible hyperparameters: {inf}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<Infeasibility> for Error {
    fn from(value: Infeasibility) -> Self {
        Error::Infeasible(value)
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}
