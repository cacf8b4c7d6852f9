//! Input signals `u_t`.
//!
//! Pseudo-random inputs draw from `ChaCha8Rng::seed_from_u64(seed)`, so a
//! config and a seed pin down the whole run.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    Constant {
        value: f64,
    },
    /// Uniform on `[−amplitude, amplitude]`.
    WhiteNoise {
        amplitude: f64,
    },
    /// `offset + Σ a_i sin(f_i t + φ_i)`, frequencies in radians per step.
    MultiSine {
        amplitudes: Vec<f64>,
        frequencies: Vec<f64>,
        #[serde(default)]
        phases: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// Maximal-length 7-bit shift register, `±amplitude`, each bit held for
    /// `hold` steps.
    Prbs {
        amplitude: f64,
        #[serde(default = "one")]
        hold: usize,
    },
    /// `amplitude` on `[start, start + len)`, zero elsewhere.
    Pulse {
        amplitude: f64,
        start: usize,
        len: usize,
    },
}

fn one() -> usize {
    1
}

impl InputSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            InputSpec::Constant { value } => value.is_finite(),
            InputSpec::WhiteNoise { amplitude } => amplitude.is_finite() && *amplitude >= 0.0,
            InputSpec::MultiSine { amplitudes, frequencies, phases, offset } => {
                if amplitudes.len() != frequencies.len() || !(phases.is_empty() || phases.len() == amplitudes.len()) {
                    return Err(CliError::Config(
                        "multi_sine needs matching amplitudes, frequencies and phases".into(),
                    ));
                }
                finite(amplitudes) && finite(frequencies) && finite(phases) && offset.is_finite()
            }
            InputSpec::Prbs { amplitude, hold } => amplitude.is_finite() && *hold >= 1,
            InputSpec::Pulse { amplitude, .. } => amplitude.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::Config(format!("invalid input signal {self:?}")))
        }
    }
}

/// Stateful generator for one run.
#[derive(Debug, Clone)]
pub struct InputSignal {
    spec: InputSpec,
    rng: ChaCha8Rng,
    register: u8,
    bit: f64,
    t: usize,
}

impl InputSignal {
    pub fn new(spec: InputSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // any non-zero state of the register lies on the maximal cycle
        let register = (rng.gen::<u8>() & 0x7f).max(1);
        InputSignal { spec, rng, register, bit: 0.0, t: 0 }
    }

    fn next_prbs_bit(&mut self) -> f64 {
        // x^7 + x^6 + 1
        let feedback = ((self.register >> 6) ^ (self.register >> 5)) & 1;
        self.register = ((self.register << 1) | feedback) & 0x7f;
        if feedback == 1 {
            1.0
        } else {
            -1.0
        }
    }
}

impl Iterator for InputSignal {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let t = self.t;
        let u = match &self.spec {
            InputSpec::Constant { value } => *value,
            InputSpec::WhiteNoise { amplitude } => {
                let a = *amplitude;
                if a == 0.0 {
                    0.0
                } else {
                    self.rng.gen_range(-a..=a)
                }
            }
            InputSpec::MultiSine { amplitudes, frequencies, phases, offset } => {
                let tf = t as f64;
                offset
                    + amplitudes
                        .iter()
                        .zip(frequencies)
                        .enumerate()
                        .map(|(i, (a, f))| a * (f * tf + phases.get(i).copied().unwrap_or(0.0)).sin())
                        .sum::<f64>()
            }
            InputSpec::Prbs { amplitude, hold } => {
                let (amplitude, hold) = (*amplitude, *hold);
                if t.is_multiple_of(hold) {
                    self.bit = self.next_prbs_bit();
                }
                amplitude * self.bit
            }
            InputSpec::Pulse { amplitude, start, len } => {
                if t >= *start && t < start + len {
                    *amplitude
                } else {
                    0.0
                }
            }
        };
        self.t += 1;
        Some(u)
    }
}
