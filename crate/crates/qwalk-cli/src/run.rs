//! Command implementations. Each builds its full output in memory and
//! writes it in one pass, so bytes are identical for identical arguments
//! regardless of the worker count.

use crate::format::fmt_float;
use crate::{CliError, FitKind, MRange};
use qwalk_core::collapsed;
use qwalk_core::fit::{
    critical_samples, fit_critical_scale, fit_pmax_constant, fit_topt_constants, FitResult,
    FittedConstants, PmaxSample, SweepObservation, ToptSample,
};
use qwalk_core::model::{self, default_step_budget};
use qwalk_core::spectral::{even_sector_weight, search_spectrum};
use qwalk_core::{Trajectory, WalkConfig};
use rayon::prelude::*;
use std::fs;
use std::path::Path;

/// Upper limit on the estimated sweep work (steps times matrix area),
/// about a minute of compute; larger grids are refused with a message.
const MAX_GRID_WORK: f64 = 5e10;

/// Relative drop that marks the end of the "almost unaffected" regime
/// when extracting critical points from a sweep.
const CRITICAL_DROP_TOLERANCE: f64 = 0.05;

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, contents)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn walk_config(m: u32, delta: f64) -> Result<WalkConfig, CliError> {
    WalkConfig::new(m, delta).map_err(|e| CliError::Usage(e.to_string()))
}

fn check_deltas(deltas: &[f64]) -> Result<(), CliError> {
    if deltas.is_empty() {
        return Err(CliError::Usage("at least one --delta is required".into()));
    }
    Ok(())
}

fn budget_for(m: u32, steps: Option<u32>) -> u32 {
    steps.unwrap_or_else(|| default_step_budget(m))
}

fn guard_grid(m_range: MRange, n_deltas: usize, steps: Option<u32>) -> Result<(), CliError> {
    let mut work = 0.0f64;
    for m in m_range.values() {
        let dim = (2 * m) as f64;
        work += budget_for(m, steps) as f64 * dim * dim * n_deltas as f64;
    }
    if work > MAX_GRID_WORK {
        return Err(CliError::Usage(format!(
            "grid too large for the configured step budget (estimated work {work:.2e} \
             exceeds {MAX_GRID_WORK:.0e}); narrow --m-range or lower --steps"
        )));
    }
    Ok(())
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// First-peak iteration of a trajectory, scanning in order.
fn first_peak_t(traj: &Trajectory) -> u32 {
    traj.first_peak().map(|p| p.t).unwrap_or(0)
}

pub fn simulate(m: u32, delta: f64, steps: u32, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = walk_config(m, delta)?;
    let traj = collapsed::evolve(&cfg, steps);
    let mut csv = String::from("t,p_success,p_gap\n");
    for pt in traj.points() {
        csv.push_str(&format!(
            "{},{},{}\n",
            pt.t,
            fmt_float(pt.p_success),
            fmt_float(pt.p_gap)
        ));
    }
    write_output(out, &csv)
}

struct SweepRow {
    m: u32,
    delta: f64,
    p_max: f64,
    t_opt: u32,
    p0_observed: f64,
}

fn sweep_rows(
    m_range: MRange,
    deltas: &[f64],
    steps: Option<u32>,
    workers: usize,
) -> Result<Vec<SweepRow>, CliError> {
    for &d in deltas {
        walk_config(m_range.lo, d)?;
    }
    guard_grid(m_range, deltas.len() + 1, steps)?;
    let ms: Vec<u32> = m_range.values().collect();
    let rows = in_pool(workers, || {
        // per-dimension error-free baseline first
        let baselines: Vec<f64> = ms
            .par_iter()
            .map(|&m| {
                let cfg = WalkConfig::new(m, 0.0).expect("validated");
                collapsed::evolve(&cfg, budget_for(m, steps))
                    .peak()
                    .map(|p| p.p_success)
                    .unwrap_or(0.0)
            })
            .collect();
        let points: Vec<(usize, f64)> = ms
            .iter()
            .enumerate()
            .flat_map(|(i, _)| deltas.iter().map(move |&d| (i, d)))
            .collect();
        points
            .par_iter()
            .map(|&(i, delta)| {
                let m = ms[i];
                let cfg = WalkConfig::new(m, delta).expect("validated");
                let traj = collapsed::evolve(&cfg, budget_for(m, steps));
                SweepRow {
                    m,
                    delta,
                    p_max: traj.peak().map(|p| p.p_success).unwrap_or(0.0),
                    t_opt: first_peak_t(&traj),
                    p0_observed: baselines[i],
                }
            })
            .collect::<Vec<_>>()
    })?;
    Ok(rows)
}

pub fn sweep(
    m_range: MRange,
    deltas: &[f64],
    steps: Option<u32>,
    out: Option<&Path>,
    workers: usize,
) -> Result<(), CliError> {
    check_deltas(deltas)?;
    let rows = sweep_rows(m_range, deltas, steps, workers)?;
    let mut csv = String::from("m,delta,p_max,t_opt,p0_observed,n_db\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.m,
            fmt_float(r.delta),
            fmt_float(r.p_max),
            r.t_opt,
            fmt_float(r.p0_observed),
            r.m - 1
        ));
    }
    write_output(out, &csv)
}

pub fn spectrum(m: u32, delta: f64, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = walk_config(m, delta)?;
    let report = search_spectrum(&cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut csv = String::from("re,im,flagged\n");
    for (i, z) in report.eigenvalues.iter().enumerate() {
        let flagged = if report.near_unit.contains(&i) { 1 } else { 0 };
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_float(z.re),
            fmt_float(z.im),
            flagged
        ));
    }
    write_output(out, &csv)
}

struct ParsedSweep {
    rows: Vec<SweepObservation>,
    t_opts: Vec<ToptSample>,
}

fn parse_sweep_csv(path: &Path) -> Result<ParsedSweep, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Usage("empty sweep CSV".into()))?;
    let expected = "m,delta,p_max,t_opt,p0_observed,n_db";
    if header.trim() != expected {
        return Err(CliError::Usage(format!(
            "unexpected sweep header {header:?}; expected {expected:?}"
        )));
    }
    let mut rows = Vec::new();
    let mut t_opts = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::Usage(format!(
                "line {}: expected 6 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("line {}: bad {what} {s:?}", lineno + 2)))
        };
        let m: u32 = fields[0]
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("line {}: bad m {:?}", lineno + 2, fields[0])))?;
        let delta = parse_f(fields[1], "delta")?;
        let p_max = parse_f(fields[2], "p_max")?;
        let t_opt = parse_f(fields[3], "t_opt")?;
        let p0_observed = parse_f(fields[4], "p0_observed")?;
        rows.push(SweepObservation {
            m,
            delta,
            p_max,
            p0_observed,
        });
        t_opts.push(ToptSample { m, delta, t_opt });
    }
    Ok(ParsedSweep { rows, t_opts })
}

fn render_fit(result: &FitResult) -> String {
    let mut out = String::new();
    match result.constants {
        FittedConstants::PeakSuccess { pmax_const } => {
            out.push_str("kind=peak_success\n");
            out.push_str(&format!("pmax_const={}\n", fmt_float(pmax_const)));
        }
        FittedConstants::IterationCount { inner, delta_coeff } => {
            out.push_str("kind=iteration_count\n");
            out.push_str(&format!("titer_inner={}\n", fmt_float(inner)));
            out.push_str(&format!("titer_delta_coeff={}\n", fmt_float(delta_coeff)));
        }
        FittedConstants::CriticalScale { slope, intercept } => {
            out.push_str("kind=critical_scale\n");
            out.push_str(&format!("crit_slope={}\n", fmt_float(slope)));
            out.push_str(&format!("crit_intercept={}\n", fmt_float(intercept)));
        }
    }
    out.push_str(&format!("residual={}\n", fmt_float(result.residual)));
    out.push_str(&format!("n_points={}\n", result.n_points));
    out
}

pub fn fit(kind: FitKind, input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let parsed = parse_sweep_csv(input)?;
    let result = match kind {
        FitKind::Pmax => {
            let samples: Vec<PmaxSample> = parsed
                .rows
                .iter()
                .map(|r| PmaxSample {
                    m: r.m,
                    delta: r.delta,
                    p_max: r.p_max,
                    p0: r.p0_observed,
                })
                .collect();
            fit_pmax_constant(&samples)
        }
        FitKind::Topt => fit_topt_constants(&parsed.t_opts),
        FitKind::Critical => {
            let samples = critical_samples(&parsed.rows, CRITICAL_DROP_TOLERANCE);
            fit_critical_scale(&samples)
        }
    }
    .map_err(|e| CliError::Numeric(e.to_string()))?;
    write_output(out, &render_fit(&result))
}

pub fn model(m: u32, deltas: &[f64], steps: u32, out: Option<&Path>) -> Result<(), CliError> {
    check_deltas(deltas)?;
    for &d in deltas {
        walk_config(m, d)?;
    }
    let params = model::ModelParams::default();
    let p0 = model::p0(m).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = String::from("t,delta,p_model\n");
    for &delta in deltas {
        for t in 0..=steps {
            let p = model::p_model_from_floor(p0, m, delta, t as f64, &params);
            csv.push_str(&format!("{},{},{}\n", t, fmt_float(delta), fmt_float(p)));
        }
    }
    write_output(out, &csv)
}

struct CompareRow {
    m: u32,
    delta: f64,
    cmp: model::GapComparison,
}

pub fn compare(
    m_range: MRange,
    deltas: &[f64],
    steps: Option<u32>,
    out: Option<&Path>,
    workers: usize,
) -> Result<(), CliError> {
    check_deltas(deltas)?;
    for &d in deltas {
        walk_config(m_range.lo, d)?;
    }
    guard_grid(m_range, deltas.len(), steps)?;
    let points: Vec<(u32, f64)> = m_range
        .values()
        .flat_map(|m| deltas.iter().map(move |&d| (m, d)))
        .collect();
    let rows: Vec<CompareRow> = in_pool(workers, || {
        points
            .par_iter()
            .map(|&(m, delta)| {
                let cfg = WalkConfig::new(m, delta).expect("validated");
                let cmp = model::gap_models(&cfg, budget_for(m, steps));
                CompareRow { m, delta, cmp }
            })
            .collect()
    })?;
    let mut csv =
        String::from("m,delta,dp1,dp2,dp1_minus_dp2,dp2_pow2m,dp1_minus_dp2_pow2m\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.m,
            fmt_float(r.delta),
            fmt_float(r.cmp.walk_gap),
            fmt_float(r.cmp.grover_gap),
            fmt_float(r.cmp.difference),
            fmt_float(r.cmp.grover_gap_vertex_paired),
            fmt_float(r.cmp.difference_vertex_paired),
        ));
    }
    write_output(out, &csv)
}

/// Diagnostic helper for tests: even-sector weights of the flagged pair.
pub fn flagged_sector_weights(m: u32, delta: f64) -> Result<Vec<f64>, CliError> {
    let cfg = walk_config(m, delta)?;
    let report = search_spectrum(&cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    let vectors = report.eigenvectors.as_ref().expect("vectors present");
    Ok(report
        .near_unit
        .iter()
        .map(|&i| even_sector_weight(&vectors[i], m))
        .collect())
}
