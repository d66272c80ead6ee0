//! Experiment driver: reproduces the walk's trajectories, parameter
//! sweeps, operator spectra, model fits, model surfaces, and the Grover
//! robustness comparison as plot-ready CSV.
//!
//! Every command writes byte-identical output for identical arguments,
//! independent of the worker count: grid points are computed in a worker
//! pool but collected and written in canonical grid order, and floats are
//! formatted locale-free with full round-trip precision.
//!
//! Exit codes: 0 on success, 1 for an invalid specification (bad flags,
//! unreadable input, oversized grid), 2 for a numeric failure (eigensolver
//! non-convergence, missing near-unit pair, degenerate fit).

pub mod format;
pub mod run;

use clap::{Parser, Subcommand, ValueEnum};
use std::fmt;
use std::path::PathBuf;

/// Worker-count environment variable honored when `--workers` is absent.
pub const WORKERS_ENV: &str = "QWALK_WORKERS";

#[derive(Debug)]
pub enum CliError {
    /// Invalid specification or I/O problem: exit code 1.
    Usage(String),
    /// Numeric failure (eigensolver, fit): exit code 2.
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "invalid specification: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

/// Inclusive dimension range `A:B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRange {
    pub lo: u32,
    pub hi: u32,
}

impl MRange {
    pub fn values(&self) -> impl Iterator<Item = u32> {
        self.lo..=self.hi
    }
}

fn parse_m_range(s: &str) -> Result<MRange, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected A:B, got {s}"))?;
    let lo: u32 = a.trim().parse().map_err(|_| format!("bad lower bound {a}"))?;
    let hi: u32 = b.trim().parse().map_err(|_| format!("bad upper bound {b}"))?;
    if lo < 2 {
        return Err("dimension range must start at 2 or above".into());
    }
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok(MRange { lo, hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    /// Saturation constant of the peak-success model.
    Pmax,
    /// Inner and error coefficients of the iteration-count model.
    Topt,
    /// Slope and intercept of the critical-scale law.
    Critical,
}

#[derive(Debug, Parser)]
#[command(
    name = "qwalk",
    about = "Hypercube quantum-walk search under systematic coin phase errors",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trajectory of one walk: success probability and gap per iteration.
    Simulate {
        /// Hypercube dimension (database size 2^(m-1)).
        #[arg(long)]
        m: u32,
        /// Systematic coin phase error in radians.
        #[arg(long)]
        delta: f64,
        /// Number of iterations to record.
        #[arg(long)]
        steps: u32,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Peak success and first-peak iteration over an (m, delta) grid.
    Sweep {
        /// Inclusive dimension range A:B.
        #[arg(long = "m-range", value_parser = parse_m_range)]
        m_range: MRange,
        /// Phase error; repeat the flag for each grid value.
        #[arg(long = "delta", required = true)]
        deltas: Vec<f64>,
        /// Per-trajectory iteration budget (default: covers one full
        /// oscillation, ceil(2.5 (pi/4) sqrt(2^m))).
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: QWALK_WORKERS, then 1).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Eigenvalues of the search step with near-unit flags.
    Spectrum {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refit model constants from a sweep CSV.
    Fit {
        #[arg(long, value_enum)]
        kind: FitKind,
        /// Sweep CSV produced by the sweep command.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form success surface over (t, delta) at fixed m.
    Model {
        #[arg(long)]
        m: u32,
        #[arg(long = "delta", required = true)]
        deltas: Vec<f64>,
        /// Largest iteration count of the t grid (rows run t = 0..=steps).
        #[arg(long)]
        steps: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk vs Grover probability gaps over an (m, delta) grid.
    Compare {
        #[arg(long = "m-range", value_parser = parse_m_range)]
        m_range: MRange,
        #[arg(long = "delta", required = true)]
        deltas: Vec<f64>,
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

/// Resolve the worker count: flag, then environment, then 1.
pub fn resolve_workers(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(w) = flag {
        if w == 0 {
            return Err(CliError::Usage("worker count must be at least 1".into()));
        }
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let w: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad {WORKERS_ENV} value {v:?}")))?;
            if w == 0 {
                return Err(CliError::Usage(format!("{WORKERS_ENV} must be at least 1")));
            }
            Ok(w)
        }
        Err(_) => Ok(1),
    }
}

/// Execute a parsed command.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            m,
            delta,
            steps,
            out,
        } => run::simulate(m, delta, steps, out.as_deref()),
        Command::Sweep {
            m_range,
            deltas,
            steps,
            out,
            workers,
        } => run::sweep(
            m_range,
            &deltas,
            steps,
            out.as_deref(),
            resolve_workers(workers)?,
        ),
        Command::Spectrum { m, delta, out } => run::spectrum(m, delta, out.as_deref()),
        Command::Fit { kind, input, out } => run::fit(kind, &input, out.as_deref()),
        Command::Model {
            m,
            deltas,
            steps,
            out,
        } => run::model(m, &deltas, steps, out.as_deref()),
        Command::Compare {
            m_range,
            deltas,
            steps,
            out,
            workers,
        } => run::compare(
            m_range,
            &deltas,
            steps,
            out.as_deref(),
            resolve_workers(workers)?,
        ),
    }
}
