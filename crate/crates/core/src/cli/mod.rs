//! Command-line front end.
//!
//! ```text
//! nlq list
//! nlq run <sec3|linear|sec5|sec6|sec7|sec8> [--p P] [--epsilon E] [--t-max T] [--dt DT]
//!         [--basis updown|diag] [--seed N] [--trials N] [--out PATH]
//!         [--format csv|json] [--precision 6..=17]
//! nlq verify-linear [--seed N] [--trials N] [--out PATH] [--format csv|json]
//! ```
//!
//! Exit codes: 0 when every scenario contract holds, 2 when one fails, 1 on
//! usage or IO errors.

pub mod export;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::scenarios::{self, BasisChoice, ScenarioConfig, ScenarioId, ScenarioReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONTRACT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioId,
    pub config: ScenarioConfig,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Run(RunConfig),
    VerifyLinear(RunConfig),
    List,
}

#[derive(Debug, Error)]
#[error("{message}")]
pub struct UsageError {
    pub message: String,
    /// `--help` or `--version` was requested; the message is the text to print.
    pub informational: bool,
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Parser, Debug)]
#[command(
    name = "nlq",
    version,
    about = "Linear vs state-dependent spin dynamics for two non-interacting spins"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Run one scenario and export its trajectories.
    Run {
        /// sec3 (alias linear), sec5, sec6, sec7 or sec8
        #[arg(value_parser = parse_scenario)]
        scenario: ScenarioId,
        #[command(flatten)]
        opts: Opts,
    },
    /// Randomized check that nothing done on R is visible in S under linear dynamics.
    VerifyLinear {
        #[command(flatten)]
        opts: Opts,
    },
    /// List scenario names.
    List,
}

#[derive(Args, Debug)]
struct Opts {
    /// Mixing probability in [0, 1].
    #[arg(long, value_parser = parse_probability)]
    p: Option<f64>,
    #[arg(long, value_parser = parse_finite, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long = "t-max", value_parser = parse_positive)]
    t_max: Option<f64>,
    #[arg(long, value_parser = parse_positive)]
    dt: Option<f64>,
    /// Measurement basis on R for sec8.
    #[arg(long, value_parser = parse_basis)]
    basis: Option<BasisChoice>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random trials for the linear baseline.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to json for a .json output path, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Significant digits in the output (6 to 17).
    #[arg(long, default_value_t = export::DEFAULT_PRECISION,
          value_parser = clap::value_parser!(u64).range(6..=17).map(|v| v as usize))]
    precision: usize,
}

fn parse_scenario(s: &str) -> Result<ScenarioId, String> {
    s.parse().map_err(|e: scenarios::UnknownScenario| e.to_string())
}

fn parse_basis(s: &str) -> Result<BasisChoice, String> {
    s.parse()
}

fn parse_finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("probability {v} outside [0, 1]"))
    }
}

impl Opts {
    fn into_run_config(self, scenario: ScenarioId) -> Result<RunConfig, UsageError> {
        let d = ScenarioConfig::default();
        let config = ScenarioConfig {
            p: self.p.unwrap_or(d.p),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            t_max: self.t_max.unwrap_or(d.t_max),
            dt: self.dt.unwrap_or(d.dt),
            basis_choice: self.basis.unwrap_or(d.basis_choice),
            seed: self.seed.unwrap_or(d.seed),
            trials: self.trials.map(|t| t as usize).unwrap_or(d.trials),
        };
        config.validate().map_err(|e| UsageError {
            message: e.to_string(),
            informational: false,
        })?;
        let format = self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => {
                OutputFormat::Json
            }
            _ => OutputFormat::Csv,
        });
        Ok(RunConfig {
            scenario,
            config,
            output_path: self.out,
            format,
            precision: self.precision,
        })
    }
}

/// Parses the full argument vector, program name first.
pub fn parse_args<I, T>(argv: I) -> Result<Command, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| UsageError {
        informational: matches!(
            e.kind(),
            ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
        ),
        message: e.render().to_string(),
    })?;
    match cli.command {
        Sub::Run { scenario, opts } => Ok(Command::Run(opts.into_run_config(scenario)?)),
        Sub::VerifyLinear { opts } => Ok(Command::VerifyLinear(
            opts.into_run_config(ScenarioId::LinearBaseline)?,
        )),
        Sub::List => Ok(Command::List),
    }
}

pub fn render_report(report: &ScenarioReport, cfg: &RunConfig) -> String {
    match cfg.format {
        OutputFormat::Csv => export::to_csv(&report.arms, cfg.precision),
        OutputFormat::Json => export::to_json(report, cfg.precision),
    }
}

/// Writes the report to the configured destination and returns the exit code
/// implied by its contracts.
pub fn emit_report(report: &ScenarioReport, cfg: &RunConfig) -> Result<i32, EmitError> {
    let text = render_report(report, cfg);
    match &cfg.output_path {
        Some(path) => fs::write(path, text).map_err(|source| EmitError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| EmitError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    Ok(if report.all_contracts_hold() {
        EXIT_OK
    } else {
        EXIT_CONTRACT
    })
}

fn run_and_emit(cfg: &RunConfig, err: &mut dyn Write) -> i32 {
    let report = match scenarios::run(cfg.scenario, &cfg.config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    for c in &report.contracts {
        let _ = writeln!(err, "{} {c}", cfg.scenario);
    }
    match emit_report(&report, cfg) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Parses `argv`, executes it, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let command = match parse_args(argv) {
        Ok(c) => c,
        Err(e) if e.informational => {
            let _ = write!(out, "{}", e.message);
            return EXIT_OK;
        }
        Err(e) => {
            let _ = write!(err, "{}", e.message);
            if !e.message.ends_with('\n') {
                let _ = writeln!(err);
            }
            return EXIT_USAGE;
        }
    };
    match command {
        Command::List => {
            for id in ScenarioId::ALL {
                let _ = writeln!(out, "{:<6} {}", id.name(), id.summary());
            }
            EXIT_OK
        }
        Command::Run(cfg) => run_and_emit(&cfg, err),
        Command::VerifyLinear(cfg) => {
            let report = match scenarios::run_linear_baseline(&cfg.config) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_USAGE;
                }
            };
            let status = if report.all_contracts_hold() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "verify-linear trials={} seed={} max_deviation={:e} {status}",
                cfg.config.trials, cfg.config.seed, report.divergence
            );
            if cfg.output_path.is_none() {
                return if report.all_contracts_hold() {
                    EXIT_OK
                } else {
                    EXIT_CONTRACT
                };
            }
            match emit_report(&report, &cfg) {
                Ok(code) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_USAGE
                }
            }
        }
    }
}
