//! Batch front end behind the `sideinfo` binary.
//!
//! Every command writes CSV (header row first, `schema_version` as the first
//! column) to `--output` or stdout. Failures print one JSON object
//! `{"error": kind, "message": text}` on stderr and map to exit codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | a verified bound was violated |
//! | 2 | input error (unreadable or invalid files, bad arguments) |
//! | 3 | an enumeration budget was exceeded |
//!
//! Outputs depend only on the arguments, the input files and
//! `SIDEINFO_BUDGET`, never on `--workers`.

mod commands;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::codes::CodeError;
use crate::dist::DistError;
use crate::entropy::EntropyError;
use crate::oracle::OracleError;
use crate::sources::SourceError;
use crate::DEFAULT_SEED;

pub use commands::{encode_decode_roundtrip, RoundTripReport};

/// Version of every CSV layout written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug, Clone)]
#[command(name = "sideinfo", version, about = "One-shot source coding with side-information")]
pub struct RunConfig {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the CSV report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// One-shot quantities of a pmf at one or more ε.
    Quantities(QuantitiesArgs),
    /// Encode a symbol stream with the random-binning code.
    Encode(EncodeArgs),
    /// Decode a bitstream with a side-information stream.
    Decode(DecodeArgs),
    /// Check a coding theorem's bounds on a pmf.
    Verify(VerifyArgs),
    /// Blocklength sweeps of normalised quantities.
    Sweep(SweepArgs),
    /// Finite-n diagnostics.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug, Clone)]
pub struct QuantitiesArgs {
    /// Joint pmf (JSON, or TSV with a .tsv extension).
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    pub eps: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct EncodeArgs {
    /// Joint pmf (JSON, or TSV with a .tsv extension).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Symbol stream, one x label per line.
    #[arg(long)]
    pub symbols: PathBuf,
    /// Slack δ in bits; bins hold ⌈h̄^ε(x) + δ⌉ bits.
    #[arg(long)]
    pub delta: f64,
    /// `uniform:E`, or a JSON file mapping x labels to ε_x.
    #[arg(long)]
    pub eps_budget: String,
    /// Bitstream output (8-byte big-endian bit count, then MSB-first bytes).
    #[arg(long)]
    pub bits: PathBuf,
    /// Codec description output (JSON).
    #[arg(long)]
    pub codec: PathBuf,
    /// Side-information stream; when given the stream is decoded back and
    /// checked.
    #[arg(long)]
    pub side_info: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DecodeArgs {
    /// Joint pmf (JSON, or TSV with a .tsv extension).
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub codec: PathBuf,
    #[arg(long)]
    pub bits: PathBuf,
    /// Side-information stream, one y label per line.
    #[arg(long)]
    pub side_info: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "4")]
    Four,
    #[value(name = "lemma5")]
    Lemma5,
    #[value(name = "rcom")]
    Rcom,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Joint pmf (JSON, or TSV with a .tsv extension).
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[arg(long, num_args = 1.., required = true)]
    pub eps: Vec<f64>,
    /// Slack δ for the binning code checks.
    #[arg(long, default_value_t = 2.0)]
    pub delta: f64,
    /// Number of seeds averaged in the error check.
    #[arg(long, default_value_t = 200)]
    pub seeds: usize,
    /// Blocklength for the rcom check.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Rcom,
    Ohs,
    Mixture,
    Spectrum,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Joint pmf or mixture file.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[arg(long)]
    pub n_max: usize,
    /// ε (or the tail level for spectrum quantiles).
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Monte Carlo samples: the fallback size for H̄_S, or the sample count
    /// for spectrum quantiles (exact when omitted).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct DiagnoseArgs {
    /// Joint pmf or mixture file.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Encoder side-information diagnostic `d_n`.
    #[arg(long, required = true)]
    pub condition1: bool,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = crate::sources::DEFAULT_GAMMA)]
    pub gamma: f64,
    /// ε_n values, one per line for n = 1, 2, …; defaults to n^{-1/2}.
    #[arg(long)]
    pub eps_seq: Option<PathBuf>,
}

/// Failure categories, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Input,
    Budget,
    BoundViolated,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::BoundViolated => 1,
            ErrorKind::Input | ErrorKind::Io => 2,
            ErrorKind::Budget => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Input,
            message: message.into(),
        }
    }

    fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            error: ErrorKind,
            exit_code: i32,
            message: &'a str,
        }
        serde_json::to_string(&Doc {
            error: self.kind,
            exit_code: self.kind.exit_code(),
            message: &self.message,
        })
        .expect("serialisable")
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        let kind = match e {
            DistError::BudgetExceeded { .. } => ErrorKind::Budget,
            _ => ErrorKind::Input,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        let kind = match e {
            EntropyError::BudgetExceeded { .. } => ErrorKind::Budget,
            EntropyError::BoundViolated(_) => ErrorKind::BoundViolated,
            _ => ErrorKind::Input,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { .. } => CliError {
                kind: ErrorKind::Budget,
                message: e.to_string(),
            },
            OracleError::BoundViolated(_) => CliError {
                kind: ErrorKind::BoundViolated,
                message: e.to_string(),
            },
            OracleError::Entropy(inner) => inner.into(),
            OracleError::Code(inner) => inner.into(),
        }
    }
}

impl From<SourceError> for CliError {
    fn from(e: SourceError) -> Self {
        match e {
            SourceError::BudgetExceeded { .. } => CliError {
                kind: ErrorKind::Budget,
                message: e.to_string(),
            },
            SourceError::BoundViolated(_) => CliError {
                kind: ErrorKind::BoundViolated,
                message: e.to_string(),
            },
            SourceError::Dist(inner) => inner.into(),
            SourceError::Entropy(inner) => inner.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            kind: ErrorKind::Io,
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError {
            kind: ErrorKind::Io,
            message: e.to_string(),
        }
    }
}

/// What a command produced: CSV text, and whether every check passed.
pub struct Outcome {
    pub csv: String,
    pub passed: bool,
}

/// Runs one configuration, writing the report to `--output` or `stdout`
/// and any error JSON to `stderr`. Returns the exit code.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(config) {
        Ok(outcome) => {
            let written = match &config.output {
                Some(path) => fs::write(path, &outcome.csv).map_err(CliError::from),
                None => stdout.write_all(outcome.csv.as_bytes()).map_err(CliError::from),
            };
            match written {
                Err(e) => report(&e, stderr),
                Ok(()) if outcome.passed => 0,
                Ok(()) => {
                    let e = CliError {
                        kind: ErrorKind::BoundViolated,
                        message: "at least one check failed; see the pass column".into(),
                    };
                    report(&e, stderr)
                }
            }
        }
        Err(e) => report(&e, stderr),
    }
}

fn report(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "{}", e.to_json());
    e.kind.exit_code()
}

/// Executes the command inside a worker pool of the requested size.
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        if w == 0 {
            return Err(CliError::input("--workers must be at least 1"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::input(e.to_string()))?;
    pool.install(|| commands::dispatch(config))
}

/// Parses `args` (including the program name) and runs. Parse failures
/// and `--help` are handled like clap does, with exit code 2 for errors.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
