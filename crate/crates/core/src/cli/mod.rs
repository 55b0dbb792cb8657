//! Command-line front end: argument parsing, input loading and reports.
//!
//! Exit codes: 0 when every check passes, 1 when the input loads but some
//! mathematical check fails, 2 for input errors.

pub mod formats;
pub mod pipeline;
pub mod render;

use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::error::Error;
use crate::numerics::Tolerance;
use crate::structureconsts::DEFAULT_INT_TOL;
pub use formats::{load, load_str, Format, Loaded, Source};
pub use pipeline::{run_pipeline, Report, Settings, Stage};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Input file: .ccjson, .design.json or .bgr
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Spectral tolerance
    #[arg(long, env = "CC_LAB_TOL", default_value_t = Tolerance::DEFAULT_EPS)]
    pub tol: f64,
    /// Integrality tolerance for intersection numbers
    #[arg(long, default_value_t = DEFAULT_INT_TOL)]
    pub int_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the coherence axioms, and C1-C6 for two fibres
    Verify(Common),
    /// Run every stage
    Report(Common),
    /// Decide P-polynomiality and classify the graph
    Classify(Common),
    /// Eigenmatrices, valencies and multiplicities
    Params(Common),
    /// Krein parameters and their feasibility
    Krein(Common),
    /// The spectral idempotent basis
    Spectral(Common),
}

#[derive(Debug, Parser)]
#[command(name = "cc-lab", version, about = "Coherent configuration toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

impl Command {
    fn split(&self) -> (Stage, &Common) {
        match self {
            Command::Verify(c) => (Stage::Verify, c),
            Command::Report(c) => (Stage::Report, c),
            Command::Classify(c) => (Stage::Classify, c),
            Command::Params(c) => (Stage::Params, c),
            Command::Krein(c) => (Stage::Krein, c),
            Command::Spectral(c) => (Stage::Spectral, c),
        }
    }
}

/// Loads the input, runs the stage and renders the report; returns the
/// rendered output and the exit code, or an input error.
pub fn execute(stage: Stage, common: &Common) -> Result<(String, i32), Error> {
    let tol = Tolerance::new(common.tol)?;
    if !(common.int_tol > 0.0 && common.int_tol < 0.5) {
        return Err(Error::InvalidTolerance(common.int_tol));
    }
    let loaded = load(&common.file)?;
    let report = match run_pipeline(&loaded, stage, Settings { tol, int_tol: common.int_tol }) {
        Ok(r) => r,
        // Design and connectivity problems are properties of a well-formed
        // input, so they count as violations rather than input errors.
        Err(e @ (Error::Design(_) | Error::Disconnected { .. })) => return Ok((format!("error: {e}\nverdict: fail\n"), EXIT_VIOLATION)),
        Err(e) => return Err(e),
    };
    let out = match common.format {
        OutputFormat::Text => render::text(&report),
        OutputFormat::Json => render::json(&report),
    };
    Ok((out, if report.passed() { EXIT_PASS } else { EXIT_VIOLATION }))
}

fn input_exit(e: &Error) -> i32 {
    match e {
        Error::Design(_) | Error::Disconnected { .. } => EXIT_VIOLATION,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (stage, common) = cli.command.split();
    match execute(stage, common) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            input_exit(&e)
        }
    }
}

/// Entry point used by the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
