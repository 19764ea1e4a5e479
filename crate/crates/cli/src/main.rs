use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod csv;

#[derive(Debug, Parser)]
#[command(name = "hoalg", version, about = "Higher-order mechanics on almost Lie algebroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of sample times (or axiom sample points for `check`).
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the algebroid axioms of a problem file.
    Check { file: PathBuf },
    /// Sample the Euler–Lagrange force along the path.
    Force { file: PathBuf },
    /// Sample the momentum along the path and report transversality.
    Momentum { file: PathBuf },
    /// Solve for a stationary trajectory by collocation.
    Solve { file: PathBuf },
    /// Run identity suites: all built-in suites, or the checks applicable to a file.
    Verify {
        file: Option<PathBuf>,
        /// Run every built-in suite.
        #[arg(long)]
        all: bool,
        /// Run only the named suite (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

pub enum Failure {
    Schema(String),
    Numeric(String),
    Identity(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Identity(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Schema(m) | Failure::Numeric(m) | Failure::Identity(m) => m,
        }
    }
}

impl From<hoalg::Error> for Failure {
    fn from(e: hoalg::Error) -> Self {
        use hoalg::Error as E;
        match e {
            E::Parse(_) | E::Unbound(_) | E::Schema(_) | E::OrderTooLarge { .. } | E::Inapplicable { .. } => Failure::Schema(e.to_string()),
            E::NotInRelation { .. } | E::Consistency(_) => Failure::Identity(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Schema(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out: Box<dyn Write> = match &cli.out {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let opts = commands::Options { seed: cli.seed, tol: cli.tol, samples: cli.samples };
    let result = match &cli.command {
        Command::Check { file } => commands::check(file, &opts, out),
        Command::Force { file } => commands::force(file, &opts, out),
        Command::Momentum { file } => commands::momentum(file, &opts, out),
        Command::Solve { file } => commands::solve(file, &opts, out),
        Command::Verify { file, all, suites } => commands::verify(file.as_deref(), *all, suites, &opts, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
