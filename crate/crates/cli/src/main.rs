mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use perimetry::Error;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "perimetry", version, about = "Planar duals, minimal cut-sets and Peierls bounds for bond percolation")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a lattice window.
    Generate(commands::GenerateArgs),
    /// Build the dual of a graph.
    Dualize(commands::DualizeArgs),
    /// Measure or certify growth and isoperimetric constants.
    Profile(commands::ProfileArgs),
    /// Count minimal cut-sets of a vertex.
    Cutsets(commands::CutsetsArgs),
    /// Count simple paths in a dual and check the doubling inequality.
    Paths(commands::PathsArgs),
    /// Evaluate the cut-set counting bound and the threshold p_star.
    Bound(commands::BoundArgs),
    /// Monte Carlo sweep of bond percolation.
    Percolate(commands::PercolateArgs),
    /// Compare an empirical crossing with p_star.
    Confront(commands::ConfrontArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::HypothesesFail(_) => 3,
        Error::WindowInsufficient { .. } => 4,
        Error::GuardExceeded { .. } => 5,
        Error::Inconsistent(_) => 6,
        Error::Malformed(_)
        | Error::Version(_)
        | Error::VertexOutOfRange(_)
        | Error::FaceOutOfRange(_)
        | Error::EdgeOutOfRange(_)
        | Error::Disconnected { .. }
        | Error::InvalidParameter(_)
        | Error::NotSimpleCycle(_)
        | Error::Io(_) => 2,
    }
}

fn report(e: &Error) -> ExitCode {
    let mut obj = json!({ "code": e.code(), "message": e.to_string() });
    if let Error::WindowInsufficient { required_radius, .. } = e {
        obj["required_radius"] = json!(required_radius);
    }
    eprintln!("{}", json!({ "error": obj }));
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", json!({ "error": { "code": "usage", "message": e.to_string().trim_end() } }));
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return report(&Error::InvalidParameter("--threads must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({ "error": { "code": "internal", "message": e.to_string() } }));
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a, cli.format),
        Command::Dualize(a) => commands::dualize(a, cli.format),
        Command::Profile(a) => commands::profile(a, cli.format),
        Command::Cutsets(a) => commands::cutsets(a, cli.format),
        Command::Paths(a) => commands::paths(a, cli.format),
        Command::Bound(a) => commands::bound(a, cli.format),
        Command::Percolate(a) => commands::percolate(a, cli.format),
        Command::Confront(a) => commands::confront(a, cli.format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
