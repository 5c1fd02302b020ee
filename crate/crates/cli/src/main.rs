//! `oscint`: batch front end for the oscillatory-integral library.

mod config;
mod integrate;
mod output;
mod solve;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;

#[derive(Parser, Debug)]
#[command(name = "oscint", version, about = "Oscillatory integrals and free-particle Schrodinger solutions")]
struct Cli {
    /// JSON file with parameter blocks; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fill the `seconds` column. Timings make output non-reproducible.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate `∫_b^∞ e^{iay²} f(y) dy` with one or more methods.
    Integrate(integrate::IntegrateArgs),
    /// Evaluate the free-particle solution on a (t, x) grid.
    SolveFree(solve::SolveArgs),
    /// Run the property suites and report pass/fail per check.
    Validate(validate::ValidateArgs),
}

/// Exit codes: 1 usage, 2 numerical non-convergence, 3 validation failure.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<oscint::Error> for Failure {
    fn from(e: oscint::Error) -> Self {
        use oscint::Error::*;
        match e {
            NonConvergence(_) | BudgetExceeded { .. } | NonFinite { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub struct Context {
    pub file: FileConfig,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

fn setup_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("OSCINT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("OSCINT_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    setup_threads()?;
    let file = match &cli.config {
        Some(p) => config::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = Context { file, out: cli.out, timing: cli.timing };
    match cli.command {
        Command::Integrate(a) => integrate::run(&a, &ctx),
        Command::SolveFree(a) => solve::run(&a, &ctx),
        Command::Validate(a) => validate::run(&a, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
