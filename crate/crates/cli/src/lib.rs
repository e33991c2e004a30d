//! Command-line driver: gate-level runs, sweeps, the simulated two-spin
//! experiment, pulse-compilation checks and backend benchmarks.

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use bvsim_core::bv::{Backend, BitString};
use clap::{Parser, Subcommand, ValueEnum};

pub use config::Config;

/// Process exit codes.
pub mod exit {
    /// The answer matched the hidden string (or every check passed).
    pub const SUCCESS: i32 = 0;
    /// The run completed but the answer was wrong or inconclusive.
    pub const MISMATCH: i32 = 1;
    /// Bad input, configuration or IO.
    pub const ERROR: i32 = 2;
}

#[derive(Debug, Parser)]
#[command(
    name = "bvsim",
    version,
    about = "Bernstein-Vazirani simulator with a two-spin NMR back end"
)]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Refined,
    Original,
    Classical,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover one hidden string.
    Run {
        a: BitString,
        #[arg(long, default_value = "dense")]
        backend: Backend,
        #[arg(long, value_enum, default_value = "refined")]
        algorithm: Algorithm,
        /// Also write the report here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Run the refined algorithm on many hidden strings.
    Sweep {
        #[arg(long)]
        n: usize,
        /// Every string is tried when this reaches 2^n.
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value = "dense")]
        backend: Backend,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        timing: bool,
    },
    /// Simulate the two-spin experiment and decode the spectrum.
    Nmr {
        a: BitString,
        /// Prefix for the emitted spectra, FIDs, sequence and report.
        #[arg(long, default_value = "nmr")]
        out: String,
    },
    /// Score every compiled pulse sequence against its ideal propagator.
    Fidelity,
    /// Time both backends; CSV `n,backend,seconds`.
    Bench {
        /// Largest product-backend size.
        #[arg(long, default_value_t = 100_000)]
        max_n: usize,
        /// Largest dense size; must not exceed the configured limit.
        #[arg(long, default_value_t = 20)]
        dense_max_n: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

/// Runs a parsed command, writing human output to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = cli
        .config
        .as_deref()
        .map_or_else(|| Ok(Config::default()), Config::load)
        .and_then(|config| commands::dispatch(cli.command, &config, out, err));
    match result {
        Ok(true) => exit::SUCCESS,
        Ok(false) => exit::MISMATCH,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit::ERROR
        }
    }
}
