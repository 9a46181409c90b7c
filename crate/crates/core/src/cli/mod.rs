//! Command-line front end.
//!
//! ```text
//! gapspec <solve|converge|pseudospec|perturb|oracle> --config RUN.toml --out DIR [--threads N] [--seed U64]
//! ```
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for numerical
//! failures. Output files are written only after the whole computation has
//! succeeded.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_converge, cmd_oracle, cmd_perturb, cmd_pseudospec, cmd_solve};
pub use config::{Reference, RunConfig};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gapspec", version, about = "Eigenvalues in spectral gaps by second-order projection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for randomised experiments; overrides the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum, enclosures and nearest eigenvalues at one truncation.
    Solve(CommonArgs),
    /// Error table with log-log slopes over a sweep of truncations.
    Converge(CommonArgs),
    /// Spectral function on a rectangular grid.
    Pseudospec(CommonArgs),
    /// Random coefficient perturbations near an isolated eigenvalue.
    Perturb(CommonArgs),
    /// Reference values independent of the projection method.
    Oracle(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Solve(a)
            | Command::Converge(a)
            | Command::Pseudospec(a)
            | Command::Perturb(a)
            | Command::Oracle(a) => a,
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    if err.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

/// Runs a parsed command and returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    let args = cli.command.common();
    crate::linalg::pin_blas_threads();
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if threads == 0 {
        eprintln!("error: --threads must be >= 1");
        return EXIT_CONFIG;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let result = pool.install(|| {
        let cfg = RunConfig::load(&args.config)?;
        match &cli.command {
            Command::Solve(_) => cmd_solve(&cfg, &args.out),
            Command::Converge(_) => cmd_converge(&cfg, &args.out),
            Command::Pseudospec(_) => cmd_pseudospec(&cfg, &args.out),
            Command::Perturb(_) => cmd_perturb(&cfg, &args.out, args.seed),
            Command::Oracle(_) => cmd_oracle(&cfg, &args.out),
        }
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}
