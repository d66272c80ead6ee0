//! Deterministic least-squares refitting of the closed-form model
//! constants from simulation sweeps.
//!
//! Every fit has a fixed initialization and iteration budget, so repeated
//! runs on the same samples yield identical results:
//! - peak success: golden-section search for the saturation constant,
//!   minimizing log-space residuals (the peak spans decades across a
//!   sweep), 240 shrink steps over a fixed bracket;
//! - iteration count: closed-form linear least squares on the linearized
//!   relation `(pi/t)^2 = inner/DB + coeff * delta^2`, refined by at most
//!   40 Gauss-Newton steps on plain (linear) residuals;
//! - critical scale: closed-form linear least squares in `log2(delta)`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("degenerate sample set: {0}")]
    Degenerate(String),
}

/// Constants recovered by a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedConstants {
    PeakSuccess { pmax_const: f64 },
    IterationCount { inner: f64, delta_coeff: f64 },
    CriticalScale { slope: f64, intercept: f64 },
}

/// Fit output: recovered constants, root-mean-square residual in the
/// fitted space, and the number of points used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub constants: FittedConstants,
    pub residual: f64,
    pub n_points: usize,
}

/// One sweep observation of the peak success rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmaxSample {
    pub m: u32,
    pub delta: f64,
    pub p_max: f64,
    /// Error-free peak for the same `m` (observed or closed form).
    pub p0: f64,
}

/// One sweep observation of the first-peak iteration count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToptSample {
    pub m: u32,
    pub delta: f64,
    pub t_opt: f64,
}

/// One extracted critical point: the largest database exponent whose peak
/// success is essentially unaffected at this error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSample {
    pub delta: f64,
    pub critical_db_exponent: f64,
}

fn db_size(m: u32) -> f64 {
    (1u64 << (m - 1)) as f64
}

fn span_check(m_values: &[u32], deltas: &[f64], len: usize) -> Result<(), FitError> {
    if len < 8 {
        return Err(FitError::Degenerate(format!(
            "need at least 8 samples, got {len}"
        )));
    }
    let mut ms = m_values.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.len() < 3 {
        return Err(FitError::Degenerate(format!(
            "need samples spanning at least 3 dimensions, got {}",
            ms.len()
        )));
    }
    let mut ds = deltas.to_vec();
    ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ds.dedup();
    if ds.len() < 2 {
        return Err(FitError::Degenerate(format!(
            "need samples spanning at least 2 error values, got {}",
            ds.len()
        )));
    }
    Ok(())
}

/// Recover the saturation constant of `p_max = p0 C / (C + delta^2 DB)`.
///
/// Only `delta > 0` samples constrain the constant; error-free rows are
/// ignored. Residuals are differences of logs.
pub fn fit_pmax_constant(samples: &[PmaxSample]) -> Result<FitResult, FitError> {
    span_check(
        &samples.iter().map(|s| s.m).collect::<Vec<_>>(),
        &samples.iter().map(|s| s.delta).collect::<Vec<_>>(),
        samples.len(),
    )?;
    let informative: Vec<&PmaxSample> = samples
        .iter()
        .filter(|s| s.delta > 0.0 && s.p_max > 0.0 && s.p0 > 0.0)
        .collect();
    if informative.len() < 4 {
        return Err(FitError::Degenerate(format!(
            "need at least 4 errored samples, got {}",
            informative.len()
        )));
    }
    let rss = |ln_c: f64| -> f64 {
        let c = ln_c.exp();
        informative
            .iter()
            .map(|s| {
                let model = s.p0 * c / (c + s.delta * s.delta * db_size(s.m));
                let r = s.p_max.ln() - model.ln();
                r * r
            })
            .sum()
    };
    // golden-section over ln C in [ln 0.05, ln 500], fixed 240 steps
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.05f64.ln(), 500f64.ln());
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (rss(x1), rss(x2));
    for _ in 0..240 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = rss(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = rss(x2);
        }
    }
    let ln_c = 0.5 * (a + b);
    let n = informative.len();
    Ok(FitResult {
        constants: FittedConstants::PeakSuccess {
            pmax_const: ln_c.exp(),
        },
        residual: (rss(ln_c) / n as f64).sqrt(),
        n_points: n,
    })
}

/// Recover `(inner, delta_coeff)` of `t = pi / sqrt(inner/DB + coeff d^2)`.
pub fn fit_topt_constants(samples: &[ToptSample]) -> Result<FitResult, FitError> {
    span_check(
        &samples.iter().map(|s| s.m).collect::<Vec<_>>(),
        &samples.iter().map(|s| s.delta).collect::<Vec<_>>(),
        samples.len(),
    )?;
    let pts: Vec<&ToptSample> = samples.iter().filter(|s| s.t_opt > 0.0).collect();
    if pts.len() < 8 {
        return Err(FitError::Degenerate(format!(
            "need at least 8 positive iteration counts, got {}",
            pts.len()
        )));
    }
    let pi = std::f64::consts::PI;
    // linearized normal equations: y = (pi/t)^2 = A u + B v, u = 1/DB, v = d^2
    let (mut suu, mut suv, mut svv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in &pts {
        let u = 1.0 / db_size(s.m);
        let v = s.delta * s.delta;
        let y = (pi / s.t_opt).powi(2);
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suy += u * y;
        svy += v * y;
    }
    let det = suu * svv - suv * suv;
    if det.abs() < 1e-30 {
        return Err(FitError::Degenerate(
            "iteration-count design matrix is rank deficient".into(),
        ));
    }
    let mut a = (svv * suy - suv * svy) / det;
    let mut b = (suu * svy - suv * suy) / det;
    if a <= 0.0 {
        return Err(FitError::Degenerate(format!(
            "linearized inner constant is non-positive ({a:.3e})"
        )));
    }
    b = b.max(0.0);

    // Gauss-Newton on linear residuals r = t - pi / sqrt(A u + B v),
    // fixed budget of 40 steps with simple halving on non-decrease.
    let rss = |a: f64, b: f64| -> f64 {
        pts.iter()
            .map(|s| {
                let q = a / db_size(s.m) + b * s.delta * s.delta;
                let r = s.t_opt - pi / q.sqrt();
                r * r
            })
            .sum()
    };
    let mut best = rss(a, b);
    for _ in 0..40 {
        // jacobian of model wrt (A, B): d t_model / dA = pi/2 q^{-3/2} u ...
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for s in &pts {
            let u = 1.0 / db_size(s.m);
            let v = s.delta * s.delta;
            let q = a * u + b * v;
            let model = pi / q.sqrt();
            let r = s.t_opt - model;
            let da = 0.5 * pi * q.powf(-1.5) * u; // -d model/dA
            let db_ = 0.5 * pi * q.powf(-1.5) * v;
            jaa += da * da;
            jab += da * db_;
            jbb += db_ * db_;
            ga += da * r;
            gb += db_ * r;
        }
        let det = jaa * jbb - jab * jab;
        let (step_a, step_b) = if det.abs() < 1e-30 {
            // B unidentifiable on this grid: move A alone
            if jaa.abs() < 1e-30 {
                break;
            }
            (-(ga / jaa), 0.0)
        } else {
            (
                -((jbb * ga - jab * gb) / det),
                -((jaa * gb - jab * ga) / det),
            )
        };
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let na = a + scale * step_a;
            let nb = (b + scale * step_b).max(0.0);
            if na > 0.0 {
                let v = rss(na, nb);
                if v < best {
                    a = na;
                    b = nb;
                    best = v;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(FitResult {
        constants: FittedConstants::IterationCount {
            inner: a,
            delta_coeff: b,
        },
        residual: (best / pts.len() as f64).sqrt(),
        n_points: pts.len(),
    })
}

/// Recover `(slope, intercept)` of
/// `critical_db_exponent = slope * log2(intercept / delta)`.
pub fn fit_critical_scale(samples: &[CriticalSample]) -> Result<FitResult, FitError> {
    let pts: Vec<&CriticalSample> = samples.iter().filter(|s| s.delta > 0.0).collect();
    let mut deltas: Vec<f64> = pts.iter().map(|s| s.delta).collect();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    deltas.dedup();
    if deltas.len() < 2 {
        return Err(FitError::Degenerate(
            "critical-scale fit needs at least 2 distinct error values".into(),
        ));
    }
    // n = alpha + beta * (-log2 delta); slope = beta, intercept = 2^(alpha/beta)
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for s in &pts {
        let x = -s.delta.log2();
        let y = s.critical_db_exponent;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 {
        return Err(FitError::Degenerate(
            "critical-scale design is rank deficient".into(),
        ));
    }
    let beta = (n * sxy - sx * sy) / det;
    let alpha = (sy - beta * sx) / n;
    if beta.abs() < 1e-9 {
        return Err(FitError::Degenerate(
            "critical-scale slope is numerically zero".into(),
        ));
    }
    let intercept = (alpha / beta).exp2();
    let rss: f64 = pts
        .iter()
        .map(|s| {
            let pred = beta * (intercept / s.delta).log2();
            let r = s.critical_db_exponent - pred;
            r * r
        })
        .sum();
    Ok(FitResult {
        constants: FittedConstants::CriticalScale {
            slope: beta,
            intercept,
        },
        residual: (rss / n).sqrt(),
        n_points: pts.len(),
    })
}

/// A row of a peak-success sweep, for critical-point extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepObservation {
    pub m: u32,
    pub delta: f64,
    pub p_max: f64,
    /// Error-free peak at the same `m`.
    pub p0_observed: f64,
}

/// Extract per-error critical points from sweep rows: for each `delta`,
/// the largest `m` (scanning upward) whose peak stays within `tolerance`
/// relative of the error-free peak. Errors whose critical point is not
/// bracketed inside the sweep range (never dropping below the tolerance)
/// are censored and excluded.
pub fn critical_samples(obs: &[SweepObservation], tolerance: f64) -> Vec<CriticalSample> {
    let mut deltas: Vec<f64> = obs.iter().map(|o| o.delta).filter(|&d| d > 0.0).collect();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    deltas.dedup();
    let mut out = Vec::new();
    for d in deltas {
        let mut rows: Vec<&SweepObservation> = obs
            .iter()
            .filter(|o| o.delta == d && o.p0_observed > 0.0)
            .collect();
        rows.sort_by_key(|o| o.m);
        let mut critical: Option<u32> = None;
        let mut bracketed = false;
        for row in rows {
            if row.p_max / row.p0_observed >= 1.0 - tolerance {
                if !bracketed {
                    critical = Some(row.m);
                }
            } else {
                bracketed = true;
            }
        }
        if bracketed {
            if let Some(m) = critical {
                out.push(CriticalSample {
                    delta: d,
                    critical_db_exponent: (m - 1) as f64,
                });
            }
        }
    }
    out
}
