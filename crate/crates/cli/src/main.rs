//! `telegraph`: exact laws, rate functions, decay rates and Monte Carlo
//! experiments for the damped and the standard telegraph process.
//!
//! Exit status is 0 on success, 1 on invalid input and 2 when a numerical
//! routine fails (quadrature, optimization, simulation budget).

mod commands;
mod error;
mod grid;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use telegraph_core::ProcessKind;

use crate::error::CliError;
use crate::grid::{Grid, List};

#[derive(Debug, Parser)]
#[command(name = "telegraph", version = manifest::TOOL_VERSION, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON file with lambda1, lambda2, c1, c2 and alpha.
    #[arg(long)]
    params: PathBuf,
    /// Directory for data files and the run manifest.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density of D(t) on a grid of positions.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        /// Positions `lo:hi:step`; defaults to the support in 200 steps.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
    },
    /// Rate functions I_D and I_S on a grid.
    Rate {
        #[command(flatten)]
        common: Common,
        /// Points `lo:hi:step`; defaults to [-c2, c1] in 300 steps.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
    },
    /// Decay rate of the level-crossing probability, closed form and numeric.
    Decay {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "damped")]
        process: ProcessKind,
    },
    /// Sample path skeletons up to a horizon.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "damped")]
        process: ProcessKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        n: u64,
        #[arg(long, default_value_t = 5.0)]
        horizon: f64,
    },
    /// Scaled log-probabilities of windows around x against the rate function.
    LdpVerify {
        #[command(flatten)]
        common: Common,
        /// Window centres, comma separated.
        #[arg(long, allow_hyphen_values = true, default_value = "-1,0,0.5")]
        x: List,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Times, comma separated.
        #[arg(long, default_value = "25,50,100,200")]
        t: List,
    },
    /// Monte Carlo level-crossing probabilities and their decay slope.
    Crossing {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "damped")]
        process: ProcessKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        /// Levels `lo:hi:step`.
        #[arg(long, default_value = "2:8:1")]
        grid: Grid,
        /// Abandon a path this far below its running maximum; default 12 / w.
        #[arg(long)]
        abandon_margin: Option<f64>,
        /// Hard cap on simulated time.
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
    },
    /// Full comparison report of the two processes.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 301)]
        grid_size: usize,
        #[arg(long, default_value_t = 10_000)]
        lln_paths: u64,
        #[arg(long, default_value_t = 100.0)]
        lln_time: f64,
        #[arg(long, default_value_t = 100_000)]
        crossing_paths: u64,
        #[arg(long, default_value = "2:8:1")]
        q_grid: Grid,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command, argv[1..].join(" ")) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
