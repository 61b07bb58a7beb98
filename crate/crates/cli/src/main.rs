//! `freqk` command-line front end.
//!
//! Exit codes: 0 success, 1 internal failure, 2 usage, 3 unreadable or
//! invalid input, 4 exact-solve cap exceeded, 5 argument out of range,
//! 6 no solution, 7 output could not be written.

mod cli;
mod commands;
mod fault;

use std::process::ExitCode;

use clap::Parser;
use freqk::Error;

use cli::{Cli, Command};
use fault::Fault;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Fault>() {
            return match f {
                Fault::Read(..) => 3,
                Fault::MissingOutDir(_) | Fault::Write(..) => 7,
            };
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Parse { .. }
                | Error::UnsupportedWeightType(_)
                | Error::UnsupportedWeightFormat(_)
                | Error::UnsupportedProblemType(_)
                | Error::DimensionMismatch { .. }
                | Error::TooFewVertices(_)
                | Error::NonPositiveDistance { .. }
                | Error::Asymmetric { .. }
                | Error::SelfDistance(_)
                | Error::VertexOutOfRange { .. }
                | Error::InvalidTour(_)
                | Error::TourMismatch { .. } => 3,
                Error::CapExceeded { .. } | Error::OracleCapExceeded { .. } | Error::BudgetExceeded { .. } => 4,
                Error::NoSolution { .. } | Error::NotHamiltonian { .. } => 6,
                _ => 5,
            };
        }
    }
    1
}

/// Command-line flags minus those that cannot change any output.
fn flags() -> String {
    let mut kept = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--workers" || a == "--out" {
            args.next();
        } else if !(a.starts_with("--workers=") || a.starts_with("--out=")) {
            kept.push(a);
        }
    }
    kept.join(" ")
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let flags = flags();
    match &cli.command {
        Command::Freqgraph(a) => commands::freqgraph(a, &flags),
        Command::Trajectory(a) => commands::trajectory(a, &flags),
        Command::Sample(a) => commands::sample(a, &flags),
        Command::Analytics(a) => commands::analytics(a, &flags),
        Command::Sparsify(a) => commands::sparsify(a, &flags),
        Command::Solve(a) => commands::solve(a, &flags),
        Command::Idsolve(a) => commands::idsolve(a, &flags),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| run(&cli))),
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
