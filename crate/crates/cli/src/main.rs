//! `patrec`: command-line front end for the rate-region toolkit.
//!
//! Subcommands: `surface` (sample inner/outer bound surfaces to CSV),
//! `envelope` (compare the two envelope routes, JSON report), `simulate`
//! (Monte Carlo recognition trials, JSONL + optional CSV sweep), and
//! `verify` (brute-force identity suites, JSON report).
//!
//! Exit codes: 0 success/pass, 1 verification failure, 2 usage error,
//! 3 I/O error. Output files never contain wall-clock data; a sidecar
//! `<out>.meta.json` carries timestamps and the tool version.

mod envelope_cmd;
mod formats;
mod simulate_cmd;
mod surface_cmd;
mod verify_cmd;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "patrec", version, about = "Rate-region surfaces, envelopes, simulation, and identity verification for compressed pattern recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a rate-region surface over a grid and write CSV (r_x,r_y,z).
    Surface(surface_cmd::SurfaceArgs),
    /// Compare the ray-scaling envelope against the two-point oracle.
    Envelope(envelope_cmd::EnvelopeArgs),
    /// Monte Carlo recognition trials over a list of block lengths.
    Simulate(simulate_cmd::SimulateArgs),
    /// Run the brute-force identity suites.
    Verify(verify_cmd::VerifyArgs),
}

/// Failure modes mapped to exit codes.
pub enum Failure {
    /// Bad arguments or configuration: exit 2.
    Usage(String),
    /// Filesystem problems: exit 3.
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

pub fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn io_failure<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Io(e.to_string())
}

/// Seed precedence: `--seed` flag, then `PATREC_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("PATREC_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| Failure::Usage(format!("PATREC_SEED is not a valid u64: {v:?}"))),
        Err(_) => Ok(0),
    }
}

/// Worker count: explicit flag, otherwise available parallelism.
pub fn worker_count(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
    .max(1)
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Surface(args) => surface_cmd::run(args),
        Command::Envelope(args) => envelope_cmd::run(args),
        Command::Simulate(args) => simulate_cmd::run(args),
        Command::Verify(args) => verify_cmd::run(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(failure) => {
            eprintln!("patrec: {}", failure.message());
            std::process::exit(failure.exit_code());
        }
    }
}
