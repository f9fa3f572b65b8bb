//! `qdets`: solve, evaluate and check quaternion dynamic equations from `qdets/1` problem files.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qdets", version, about = "Linear quaternion dynamic equations on time scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    /// Problem file (JSON, schema qdets/1).
    pub file: PathBuf,
    /// Directory for output artifacts.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Acceptance tolerance for residual checks.
    #[arg(long, env = "QDETS_TOL")]
    pub tol: Option<f64>,
    /// Substep used to discretize dense parts of the time scale.
    #[arg(long)]
    pub substep: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the problem and write the solution table and a run report.
    Solve(Common),
    /// Compare the generalized exponential E_p(t,s) with the solution operator psi_p(t,s).
    Exp {
        #[command(flatten)]
        common: Common,
        /// Evaluation time
        #[arg(long)]
        t: f64,
        /// Defaults to the window start.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Run the invariant suites on the problem.
    Check(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(c) => commands::solve(&c),
        Command::Exp { common, t, s } => commands::exp(&common, t, s),
        Command::Check(c) => commands::check(&c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdets: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
