#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tvgain::commands::{self, FixedRates};
use tvgain::config::{ExperimentConfig, TuningConfig};
use tvgain::error::CliError;
use tvgain::report::RunReport;
use tvgain::{sim, trace};
use tvgain_core::excitation::ExcitationReport;
use tvgain_core::gain::Certification;

#[derive(Parser)]
#[command(name = "tvgain", version, about = "Adaptive parameter estimation with a time-varying gain matrix")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Format of what is printed on stdout.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the plant, tune, run the estimator and verify the certificates.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Measure the excitation of a regressor stream.
    Detect {
        #[command(flatten)]
        common: Common,
        /// Regressor CSV, one regressor per line (instead of simulating a config).
        #[arg(long)]
        phis: Option<PathBuf>,
        /// Candidate window lengths.
        #[arg(long = "window")]
        windows: Vec<usize>,
        /// Comma-separated grid the levels are rounded down to.
        #[arg(long, value_delimiter = ',')]
        alpha_grid: Option<Vec<f64>>,
        /// Forgetting factor of the filtered information matrix.
        #[arg(long, default_value_t = 0.5)]
        lambda_omega: f64,
    },
    /// Select hyperparameters for a measured excitation.
    Tune {
        #[command(flatten)]
        common: Common,
        /// Excitation report JSON (instead of simulating a config).
        #[arg(long)]
        excitation: Option<PathBuf>,
        /// Initial and largest gain eigenvalue.
        #[arg(long)]
        gamma_max: Option<f64>,
        /// Fraction of each admissible interval to use, in (0, 1).
        #[arg(long)]
        safety: Option<f64>,
        /// Certify only the gain bounds instead of the decay.
        #[arg(long)]
        gain_bounds_only: bool,
        /// Fix λ_Ω instead of searching for it.
        #[arg(long)]
        lambda_omega: Option<f64>,
        /// Fix λ_Γ (requires --lambda-omega).
        #[arg(long)]
        lambda_gamma: Option<f64>,
        /// Fix κ (requires --lambda-omega).
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Check a trace against the bounds in its report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Trace CSV written by `simulate`.
        #[arg(long)]
        trace: PathBuf,
        /// Report JSON written by `simulate`.
        #[arg(long)]
        report: PathBuf,
    },
    /// Run several estimators on the same scenario.
    Compare {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<ExperimentConfig, CliError> {
    let path = common.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print<T: Serialize>(value: &T, format: Format) -> Result<(), CliError> {
    let json = serde_json::to_value(value).map_err(|e| CliError::Parse { what: "output", detail: e.to_string() })?;
    match format {
        Format::Json => emit(&(serde_json::to_string_pretty(&json).unwrap_or_default() + "\n")),
        Format::Csv => {
            let mut text = String::from("field,value\n");
            if let serde_json::Value::Object(map) = json {
                for (k, v) in map {
                    text += &format!("{k},{v}\n");
                }
            }
            emit(&text);
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(dir: &std::path::Path, name: &str, value: &T) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Parse { what: "output", detail: e.to_string() })?;
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { common } => {
            let config = load_config(&common)?;
            let outcome = commands::simulate(&config, common.out.as_deref())?;
            match common.format {
                Format::Json => print(&outcome.report, Format::Json)?,
                Format::Csv => emit(&trace::render(outcome.rows())),
            }
            if !outcome.report.verified() {
                return Err(CliError::Violations("decay or gain bounds violated inside the certified window".into()));
            }
            Ok(())
        }
        Command::Detect { common, phis, windows, alpha_grid, lambda_omega } => {
            let (stream, mut tuning) = match (&phis, &common.config) {
                (Some(path), _) => (commands::read_regressors(path)?, TuningConfig::default()),
                (None, Some(_)) => {
                    let config = load_config(&common)?;
                    (sim::simulate_plant(&config)?.phis(), config.tuning)
                }
                (None, None) => return Err(CliError::Config("detect needs --phis or --config".into())),
            };
            if !windows.is_empty() {
                tuning.windows = windows;
            }
            if alpha_grid.is_some() {
                tuning.alpha_grid = alpha_grid;
            }
            let report = commands::detect_stream(&stream, &tuning, lambda_omega)?;
            if let Some(dir) = &common.out {
                write_json(dir, "excitation.json", &report)?;
            }
            print(&report, common.format)
        }
        Command::Tune {
            common,
            excitation,
            gamma_max,
            safety,
            gain_bounds_only,
            lambda_omega,
            lambda_gamma,
            kappa,
        } => {
            let (report, tuning) = match (&excitation, &common.config) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                    let report: ExcitationReport = serde_json::from_str(&text)
                        .map_err(|e| CliError::Parse { what: "excitation report", detail: e.to_string() })?;
                    (report, TuningConfig::default())
                }
                (None, Some(_)) => {
                    let config = load_config(&common)?;
                    let phis = sim::simulate_plant(&config)?.phis();
                    (commands::detect_stream(&phis, &config.tuning, 0.5)?, config.tuning)
                }
                (None, None) => return Err(CliError::Config("tune needs --excitation or --config".into())),
            };
            let certification = if gain_bounds_only { Certification::GainBounds } else { tuning.certification };
            let out = commands::tune_report(
                &report,
                gamma_max.unwrap_or(tuning.gamma_max),
                safety.unwrap_or(tuning.safety),
                certification,
                FixedRates { lambda_omega, lambda_gamma, kappa },
            )?;
            for c in &out.feasibility.constraints {
                eprintln!(
                    "{:<40} value {:<24} lower {:<24} upper {:<24} {}",
                    c.constraint,
                    c.value,
                    c.lower.map_or("-".to_string(), |x| x.to_string()),
                    c.upper.map_or("-".to_string(), |x| x.to_string()),
                    if c.satisfied { "ok" } else { "VIOLATED" }
                );
            }
            if let Some(dir) = &common.out {
                write_json(dir, "hyperparameters.json", &out)?;
            }
            print(&out, common.format)?;
            if !out.feasibility.feasible {
                let first = out.feasibility.constraints.iter().find(|c| !c.satisfied);
                return Err(CliError::Infeasible(tvgain_core::Error::Infeasible(tvgain_core::Infeasibility {
                    constraint: first.map_or_else(String::new, |c| c.constraint.clone()),
                    lower: first.and_then(|c| c.lower).unwrap_or(f64::NAN),
                    upper: first.and_then(|c| c.upper).unwrap_or(f64::NAN),
                })));
            }
            Ok(())
        }
        Command::Verify { common, trace: trace_path, report } => {
            let rows = trace::read(&trace_path)?;
            let report = RunReport::read(&report)?;
            let out = commands::verify(&rows, &report);
            if let Some(dir) = &common.out {
                write_json(dir, "verify.json", &out)?;
            }
            if let Some(d) = &out.decay {
                eprintln!(
                    "checked {} step(s), {} exempt, {} uncertified, {} contraction violation(s), {} envelope violation(s)",
                    d.steps_checked,
                    d.steps_exempt,
                    d.steps_uncertified,
                    d.violations.len(),
                    d.envelope_violations.len()
                );
            }
            print(&out, common.format)?;
            if out.ok {
                Ok(())
            } else {
                Err(CliError::Violations("violations inside the certified window".into()))
            }
        }
        Command::Compare { common } => {
            let config = load_config(&common)?;
            let metrics = commands::compare(&config)?;
            if let Some(dir) = &common.out {
                write_json(dir, "compare.json", &metrics)?;
            }
            match common.format {
                Format::Csv => emit(&commands::metrics_table(&metrics)),
                Format::Json => print(&metrics, Format::Json)?,
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
