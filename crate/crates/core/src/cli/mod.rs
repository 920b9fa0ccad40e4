//! Command-line front end. Exit codes: 0 success (including an explicit
//! "undecided"), 2 invalid input, 3 numerical failure.

mod commands;
pub mod output;
pub mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub use scenario::ScenarioFile;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::StepSizeUnderflow { .. } | Error::NonFinite { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "vh-reef", version, about = "Coral/alga production models: stages, competition, invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one stage and write trajectory.csv, events.json, trajectory.svg.
    Simulate {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        stage: StageArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the three stages back to back and report whether the coral recovered.
    Pipeline {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict the outcome of two-species competition.
    Classify {
        #[arg(long, required_unless_present = "sweep")]
        k1: Option<f64>,
        #[arg(long, required_unless_present = "sweep")]
        k2: Option<f64>,
        #[arg(long, required_unless_present = "sweep")]
        mu1: Option<f64>,
        #[arg(long, required_unless_present = "sweep")]
        mu2: Option<f64>,
        /// Confirm the prediction by simulation.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Initial A1 as a fraction of K1.
        #[arg(long, default_value_t = crate::dynamics::PROBE_FRACTIONS.0)]
        f1: f64,
        /// Initial A2 as a fraction of K2.
        #[arg(long, default_value_t = crate::dynamics::PROBE_FRACTIONS.1)]
        f2: f64,
        #[arg(long, default_value_t = 400.0)]
        horizon: f64,
        /// Verify this many random parameter draws instead.
        #[arg(long, conflicts_with_all = ["k1", "k2", "mu1", "mu2"])]
        sweep: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Minimum relative distance of the draws from the thresholds.
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
    },
    /// Compute the KCC invariants bundle and write invariants.json.
    Invariants {
        /// Scenario file (required for stage1 and stage3).
        scenario: Option<PathBuf>,
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long, value_enum, default_value_t = FormArg::Printed)]
        form: FormArg,
        /// Coefficient file for `--system file`.
        #[arg(long, required_if_eq("system", "file"))]
        gamma: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the production-cost functional along the intrinsic-time flow.
    Conservation {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        psi: Option<PsiArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two invariants.json files under a coordinate renaming.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Comma-separated renaming, e.g. `1,0`. Identity by default.
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value_t = crate::kcc::EQUIVALENCE_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StageArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "2r")]
    TwoReduced,
    #[value(name = "3")]
    Three,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SystemArg {
    Stage1,
    Stage3,
    File,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormArg {
    Printed,
    Derived,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PsiArg {
    Paper,
    Derived,
    Both,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("vh-reef: {f}");
            f.exit_code()
        }
    }
}
