//! Closed-form models for the search's peak success rate, optimal
//! iteration count, critical database scale, and probability gaps, plus
//! the Grover-baseline gap comparison.
//!
//! All model formulas are expressed in terms of the searched database
//! size `DB = 2^(m-1)` (the even-weight vertex count of the `m`-cube):
//! the error-free optimal iteration count is `(pi/4) sqrt(DB)` and the
//! phase error competes with `1/DB`, which is what simulation sweeps of
//! the walk reproduce.

use crate::collapsed;
use crate::config::WalkConfig;
use crate::spectral::c_squared;
use crate::trajectory::Trajectory;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("closed-form success floor requires even m >= 4, got {0}")]
    UnsupportedDimension(u32),
    #[error("critical scale is defined for 0 < delta <= {intercept}, got {delta}")]
    DeltaOutsideModel { delta: f64, intercept: f64 },
    #[error("model constants must be strictly positive")]
    NonPositiveConstant,
    #[error("malformed key=value record: {0}")]
    BadRecord(String),
}

/// Fitted constants of the closed-form models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Saturation constant of the peak-success model (fitted value 3.8).
    pub pmax_const: f64,
    /// Inner constant of the iteration-count model (fitted value 16).
    pub titer_inner: f64,
    /// Phase-error coefficient of the iteration-count model (fitted 4).
    pub titer_delta_coeff: f64,
    /// Slope of the critical-scale law (fitted value 1.806).
    pub crit_slope: f64,
    /// Intercept of the critical-scale law (fitted value 0.4642).
    pub crit_intercept: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            pmax_const: 3.8,
            titer_inner: 16.0,
            titer_delta_coeff: 4.0,
            crit_slope: 1.806,
            crit_intercept: 0.4642,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.pmax_const,
            self.titer_inner,
            self.titer_delta_coeff,
            self.crit_slope,
            self.crit_intercept,
        ];
        if all.iter().any(|&v| v.is_nan() || v <= 0.0) {
            return Err(ModelError::NonPositiveConstant);
        }
        Ok(())
    }

    /// Plain-text `key=value` record, one constant per line.
    pub fn to_key_value(&self) -> String {
        format!(
            "pmax_const={}\ntiter_inner={}\ntiter_delta_coeff={}\ncrit_slope={}\ncrit_intercept={}\n",
            self.pmax_const,
            self.titer_inner,
            self.titer_delta_coeff,
            self.crit_slope,
            self.crit_intercept
        )
    }

    /// Parse a `key=value` record; unknown keys are rejected, missing keys
    /// keep their defaults.
    pub fn from_key_value(text: &str) -> Result<Self, ModelError> {
        let mut params = Self::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ModelError::BadRecord(format!("missing '=' in {line:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| ModelError::BadRecord(format!("bad number in {line:?}")))?;
            match key.trim() {
                "pmax_const" => params.pmax_const = value,
                "titer_inner" => params.titer_inner = value,
                "titer_delta_coeff" => params.titer_delta_coeff = value,
                "crit_slope" => params.crit_slope = value,
                "crit_intercept" => params.crit_intercept = value,
                other => {
                    return Err(ModelError::BadRecord(format!("unknown key {other:?}")));
                }
            }
        }
        params.validate()?;
        Ok(params)
    }
}

/// Searched database size `2^(m-1)` as a float.
fn db_size(m: u32) -> f64 {
    (1u64 << (m - 1)) as f64
}

/// Error-free peak success rate `1/c^2`; increases toward 1 with `m`.
/// Defined by the closed form only for even `m >= 4`; odd dimensions are
/// measured empirically from the error-free trajectory instead.
pub fn p0(m: u32) -> Result<f64, ModelError> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(ModelError::UnsupportedDimension(m));
    }
    Ok(1.0 / c_squared(m))
}

/// Peak success rate with a supplied error-free floor (any `m >= 2`):
/// `p0 * C / (C + delta^2 DB)`.
pub fn p_max_from_floor(p0_value: f64, m: u32, delta: f64, params: &ModelParams) -> f64 {
    let c = params.pmax_const;
    p0_value * c / (c + delta * delta * db_size(m))
}

/// Peak success rate under a systematic phase error (even `m >= 4`).
pub fn p_max_model(m: u32, delta: f64, params: &ModelParams) -> Result<f64, ModelError> {
    Ok(p_max_from_floor(p0(m)?, m, delta, params))
}

/// Iterations to the first success peak:
/// `pi / sqrt(inner/DB + coeff * delta^2)`.
/// At `delta = 0` with the fitted constants this is `(pi/4) sqrt(DB)`.
pub fn t_opt_model(m: u32, delta: f64, params: &ModelParams) -> f64 {
    std::f64::consts::PI
        / (params.titer_inner / db_size(m) + params.titer_delta_coeff * delta * delta).sqrt()
}

/// Critical database exponent: databases up to `2^(this value)` are almost
/// unaffected by a systematic phase error `delta`. The walk dimension with
/// that database is larger by one.
pub fn critical_scale(delta: f64, params: &ModelParams) -> Result<f64, ModelError> {
    if delta.is_nan() || delta <= 0.0 || delta > params.crit_intercept {
        return Err(ModelError::DeltaOutsideModel {
            delta,
            intercept: params.crit_intercept,
        });
    }
    Ok(params.crit_slope * (params.crit_intercept / delta).log2())
}

/// Largest walk dimension `m` whose database is almost unaffected.
pub fn critical_dimension(delta: f64, params: &ModelParams) -> Result<f64, ModelError> {
    Ok(critical_scale(delta, params)? + 1.0)
}

/// Success rate after `t` iterations, with a supplied error-free floor.
/// The sine frequency is tied to [`t_opt_model`] so the first maximum
/// falls exactly at the modeled optimal iteration count.
pub fn p_model_from_floor(
    p0_value: f64,
    m: u32,
    delta: f64,
    t: f64,
    params: &ModelParams,
) -> f64 {
    let amplitude = p_max_from_floor(p0_value, m, delta, params);
    let freq =
        0.5 * (params.titer_inner / db_size(m) + params.titer_delta_coeff * delta * delta).sqrt();
    amplitude * (freq * t).sin().powi(2)
}

/// Success rate after `t` iterations (even `m >= 4`); zero at `t = 0`.
pub fn p_model(m: u32, delta: f64, t: f64, params: &ModelParams) -> Result<f64, ModelError> {
    Ok(p_model_from_floor(p0(m)?, m, delta, t, params))
}

/// Peak success of Grover's algorithm on a `2^n_db` database under a
/// systematic inversion-phase mismatch: `4 / (4 + delta^2 2^n_db)`.
pub fn grover_pmax_model(n_db: u32, delta: f64) -> f64 {
    let n = (1u64 << n_db) as f64;
    4.0 / (4.0 + delta * delta * n)
}

/// Grover probability gap implied by a peak success `p_max` on a database
/// of `n` items: `p_max - (1 - p_max)/(n - 1)` (the rest stays uniform).
pub fn grover_gap_model(p_max: f64, n_items: f64) -> f64 {
    p_max - (1.0 - p_max) / (n_items - 1.0)
}

/// Default trajectory budget: `ceil(2.5 (pi/4) sqrt(2^m))` iterations,
/// covering at least one full oscillation period.
pub fn default_step_budget(m: u32) -> u32 {
    (2.5 * std::f64::consts::FRAC_PI_4 * ((1u64 << m) as f64).sqrt()).ceil() as u32
}

/// Simulated walk gap against the Grover baseline at matched scales.
#[derive(Debug, Clone, Copy)]
pub struct GapComparison {
    /// Walk gap at the iteration of peak success (simulated).
    pub walk_gap: f64,
    /// Grover gap on an equal database of `2^(m-1)` items (closed form).
    pub grover_gap: f64,
    /// `walk_gap - grover_gap`.
    pub difference: f64,
    /// Grover gap when paired by vertex count `2^m` instead.
    pub grover_gap_vertex_paired: f64,
    /// `walk_gap - grover_gap_vertex_paired`.
    pub difference_vertex_paired: f64,
}

/// Compare the simulated walk gap with the Grover-model gap.
pub fn gap_models(cfg: &WalkConfig, budget: u32) -> GapComparison {
    let trajectory = collapsed::evolve(cfg, budget);
    gap_models_from_trajectory(cfg, &trajectory)
}

/// As [`gap_models`], reusing an existing trajectory.
pub fn gap_models_from_trajectory(cfg: &WalkConfig, trajectory: &Trajectory) -> GapComparison {
    let walk_gap = trajectory.peak().map(|p| p.p_gap).unwrap_or(0.0);
    let m = cfg.m();
    let delta = cfg.delta();

    let p_equal = grover_pmax_model(m - 1, delta);
    let grover_gap = grover_gap_model(p_equal, (1u64 << (m - 1)) as f64);

    let p_vertex = grover_pmax_model(m, delta);
    let grover_gap_vertex_paired = grover_gap_model(p_vertex, (1u64 << m) as f64);

    GapComparison {
        walk_gap,
        grover_gap,
        difference: walk_gap - grover_gap,
        grover_gap_vertex_paired,
        difference_vertex_paired: walk_gap - grover_gap_vertex_paired,
    }
}
