//! `spk2d` — verification, transport, classification, fitting and sampling
//! for two-dimensional special Kähler structures with isolated singularities.
//!
//! Exit codes: 0 pass, 1 numeric-check failure, 2 parse error,
//! 3 domain/path error, 4 I/O error. Stdout is deterministic for fixed
//! inputs; timing goes to stderr.

mod commands;
mod util;

use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use spk2d::transport::Frame;

#[derive(Parser)]
#[command(name = "spk2d", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Vector,
    Covector,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Frame {
        match f {
            FrameArg::Vector => Frame::Vector,
            FrameArg::Covector => Frame::Covector,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Metric,
    U,
    ConnectionNorm,
    LcDeviation,
    HolonomyTraceVsR,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining PDE system and flatness of a model on a grid
    Verify {
        /// Model spec: inline JSON or a path to a JSON file
        #[arg(long)]
        model: String,
        /// Grid as nr,ntheta,rmin,rmax (radii log-spaced)
        #[arg(long, default_value = "20,20,0.05,0.9")]
        grid: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Side length of the loop-transport flatness probe
        #[arg(long, default_value_t = 0.01)]
        side: f64,
    },
    /// Holonomy around the puncture with basepoint (r, 0)
    Holonomy {
        #[arg(long)]
        model: String,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = FrameArg::Covector)]
        frame: FrameArg,
    },
    /// Parallel transport along a path read from a JSON file
    Transport {
        #[arg(long)]
        model: String,
        /// Path JSON: {"segments":[{"type":"radial",...},...]}
        #[arg(long)]
        path_file: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = FrameArg::Covector)]
        frame: FrameArg,
    },
    /// Classify a holonomy order or matrix; optionally list compatible
    /// singular-fiber types
    #[command(group(ArgGroup::new("input").required(true).args(["beta", "matrix"])))]
    #[command(group(ArgGroup::new("kind").args(["conical", "logarithmic"])))]
    Classify {
        /// Twice the singularity order (β conical, n+1 logarithmic)
        #[arg(long)]
        beta: Option<f64>,
        /// Path to a JSON 2x2 matrix [[a,b],[c,d]]
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        conical: bool,
        #[arg(long)]
        logarithmic: bool,
        /// List compatible singular-fiber types (needs --conical or --logarithmic)
        #[arg(long)]
        kodaira: bool,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Fit conical/logarithmic asymptotics to `r,u` samples from a CSV file
    Fit {
        /// CSV with header `r,u`, radii strictly decreasing
        csv_path: String,
        /// Known order of the cubic form, used as the bound β < n+1
        #[arg(long)]
        n_hint: Option<i32>,
    },
    /// Sample a quantity of a model over a grid into a CSV file
    Sample {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum)]
        quantity: QuantityArg,
        #[arg(long, default_value = "20,1,0.001,0.4")]
        grid: String,
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// List the model catalog and its JSON spec formats
    Models,
}

/// Error carrying the process exit code.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
    pub fn domain(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = run(cli.command);
    eprintln!("wall_time_s: {:.3}", started.elapsed().as_secs_f64());
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Verify {
            model,
            grid,
            tol,
            side,
        } => commands::verify(&model, &grid, tol, side),
        Command::Holonomy {
            model,
            r,
            tol,
            frame,
        } => commands::holonomy(&model, r, tol, frame.into()),
        Command::Transport {
            model,
            path_file,
            tol,
            frame,
        } => commands::transport(&model, &path_file, tol, frame.into()),
        Command::Classify {
            beta,
            matrix,
            conical,
            logarithmic,
            kodaira,
            tol,
        } => commands::classify(beta, matrix.as_deref(), conical, logarithmic, kodaira, tol),
        Command::Fit { csv_path, n_hint } => commands::fit(&csv_path, n_hint),
        Command::Sample {
            model,
            quantity,
            grid,
            out,
            tol,
        } => commands::sample(&model, quantity, &grid, &out, tol),
        Command::Models => commands::models(),
    }
}
