//! Grover's algorithm with a systematic phase mismatch between its two
//! inversions, the baseline of the robustness comparison.
//!
//! The oracle flips the marked item by `e^{i(pi - delta)}` and the
//! diffusion reflects with phase `pi + delta`, so the two inversions
//! disagree by `2 delta` systematically at every iteration. This is the
//! placement whose peak success follows `4 / (4 + delta^2 2^n_db)`, which
//! simulation here confirms to a few parts in 10^4; a one-sided error of
//! the same magnitude is measurably (about fourfold in `delta^2`) milder.
//! At `delta = 0` both inversions are exact and the algorithm is plain
//! Grover search.

use crate::trajectory::{Trajectory, TrajectoryPoint};
use crate::C64;
use std::f64::consts::PI;
use thiserror::Error;

/// Largest database exponent the dense state accepts.
pub const MAX_DB_EXPONENT: u32 = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroverError {
    #[error("database exponent {0} too large for the dense representation (max {1})")]
    DatabaseTooLarge(u32, u32),
    #[error("marked item {item} out of range for database exponent {n_db}")]
    MarkedOutOfRange { item: u64, n_db: u32 },
}

/// Dense amplitude vector over the database items.
#[derive(Debug, Clone)]
pub struct GroverState {
    n_db: u32,
    marked: usize,
    amp: Vec<C64>,
}

impl GroverState {
    /// Uniform superposition over `2^n_db` items.
    pub fn uniform(n_db: u32, marked: u64) -> Result<Self, GroverError> {
        if n_db > MAX_DB_EXPONENT {
            return Err(GroverError::DatabaseTooLarge(n_db, MAX_DB_EXPONENT));
        }
        if marked >> n_db != 0 {
            return Err(GroverError::MarkedOutOfRange {
                item: marked,
                n_db,
            });
        }
        let n = 1usize << n_db;
        let a = 1.0 / (n as f64).sqrt();
        Ok(Self {
            n_db,
            marked: marked as usize,
            amp: vec![C64::new(a, 0.0); n],
        })
    }

    pub fn n_db(&self) -> u32 {
        self.n_db
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn marked_probability(&self) -> f64 {
        self.amp[self.marked].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Marked probability minus the largest unmarked item probability.
    pub fn gap(&self) -> f64 {
        let rest = self
            .amp
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.marked)
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0f64, f64::max);
        self.marked_probability() - rest
    }

    /// Spread between the largest and smallest unmarked probability; zero
    /// when the residual register stays uniform.
    pub fn unmarked_spread(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (i, a) in self.amp.iter().enumerate() {
            if i != self.marked {
                let p = a.norm_sqr();
                lo = lo.min(p);
                hi = hi.max(p);
            }
        }
        if hi == 0.0 {
            0.0
        } else {
            hi - lo
        }
    }

    /// One iteration: errored oracle phase, then errored diffusion.
    pub fn step(&mut self, delta: f64) {
        let oracle = C64::from_polar(1.0, PI - delta);
        self.amp[self.marked] *= oracle;
        let f = 1.0 - C64::from_polar(1.0, PI + delta);
        let mean = self.amp.iter().sum::<C64>() / self.amp.len() as f64;
        let fm = f * mean;
        for a in &mut self.amp {
            *a = fm - *a;
        }
    }
}

/// Default iteration budget: `ceil(2 (pi/4) sqrt(2^n_db))`.
pub fn default_grover_budget(n_db: u32) -> u32 {
    (2.0 * std::f64::consts::FRAC_PI_4 * ((1u64 << n_db) as f64).sqrt()).ceil() as u32
}

/// Run the search for `t_max` iterations, recording the marked-item
/// probability and the probability gap after each.
pub fn grover_run(n_db: u32, delta: f64, t_max: u32) -> Result<Trajectory, GroverError> {
    let (trajectory, _) = grover_run_with_state(n_db, delta, t_max)?;
    Ok(trajectory)
}

/// As [`grover_run`], also returning the final state.
pub fn grover_run_with_state(
    n_db: u32,
    delta: f64,
    t_max: u32,
) -> Result<(Trajectory, GroverState), GroverError> {
    let mut state = GroverState::uniform(n_db, 0)?;
    let mut traj = Trajectory::new();
    for t in 1..=t_max {
        state.step(delta);
        traj.push(TrajectoryPoint {
            t,
            p_success: state.marked_probability(),
            p_gap: state.gap(),
        });
    }
    Ok((traj, state))
}

/// Simulated probability gap at the iteration of peak success, over the
/// default budget.
pub fn grover_gap(n_db: u32, delta: f64) -> Result<f64, GroverError> {
    let traj = grover_run(n_db, delta, default_grover_budget(n_db))?;
    Ok(traj.peak().map(|p| p.p_gap).unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_start_has_baseline_probability() {
        let s = GroverState::uniform(10, 0).unwrap();
        assert!((s.marked_probability() - 1.0 / 1024.0).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_free_search_peaks_near_one_at_quarter_pi_sqrt_n() {
        let traj = grover_run(10, 0.0, default_grover_budget(10)).unwrap();
        let peak = traj.peak().unwrap();
        assert!(peak.p_success >= 0.999, "peak {}", peak.p_success);
        let expect = (std::f64::consts::FRAC_PI_4 * 32.0).round() as u32;
        assert_eq!(peak.t, expect); // 25
    }

    #[test]
    fn zero_iterations_empty_trajectory() {
        assert!(grover_run(8, 0.1, 0).unwrap().is_empty());
    }

    #[test]
    fn step_is_unitary_for_any_delta() {
        let mut s = GroverState::uniform(8, 3).unwrap();
        for _ in 0..20 {
            s.step(0.37);
        }
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unmarked_amplitudes_stay_uniform() {
        let (_, state) = grover_run_with_state(8, 0.05, 30).unwrap();
        assert!(state.unmarked_spread() < 1e-14);
    }

    #[test]
    fn halved_peak_when_error_argument_is_four() {
        // delta^2 * 2^n = 4 halves the peak
        let traj = grover_run(10, 0.0625, default_grover_budget(10)).unwrap();
        let peak = traj.peak().unwrap().p_success;
        assert!((peak - 0.5).abs() < 0.05, "peak {peak}");
    }

    #[test]
    fn gap_matches_uniform_rest_identity() {
        // all unmarked equal, so gap = p - (1-p)/(N-1) at every step
        let (traj, _) = grover_run_with_state(8, 0.02, 20).unwrap();
        for pt in traj.points() {
            let n = 256.0;
            let expect = pt.p_success - (1.0 - pt.p_success) / (n - 1.0);
            assert!((pt.p_gap - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_oversized_database() {
        assert!(matches!(
            GroverState::uniform(MAX_DB_EXPONENT + 1, 0),
            Err(GroverError::DatabaseTooLarge(..))
        ));
    }

    #[test]
    fn rejects_out_of_range_marked_item() {
        assert!(matches!(
            GroverState::uniform(4, 16),
            Err(GroverError::MarkedOutOfRange { .. })
        ));
    }
}
