//! Per-iteration success probabilities and probability gaps.

/// One recorded iteration. `t` starts at 1; the state before the first
/// iteration is not part of the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: u32,
    pub p_success: f64,
    pub p_gap: f64,
}

/// Success probability and gap after every full search iteration.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self { points: Vec::new() }
    }

    pub fn push(&mut self, point: TrajectoryPoint) {
        if let Some(last) = self.points.last() {
            debug_assert!(point.t > last.t);
        }
        self.points.push(point);
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Global success-probability maximum; earliest iteration on ties.
    pub fn peak(&self) -> Option<TrajectoryPoint> {
        let mut best: Option<TrajectoryPoint> = None;
        for p in &self.points {
            if best.is_none_or(|b| p.p_success > b.p_success) {
                best = Some(*p);
            }
        }
        best
    }

    /// Earliest local success-probability maximum whose height is at least
    /// half the global maximum. Beating between near-degenerate rotation
    /// frequencies can push a later oscillation peak fractionally above the
    /// first one, so the global argmax is not a stable "optimal iteration
    /// count"; the first local peak is.
    pub fn first_peak(&self) -> Option<TrajectoryPoint> {
        let n = self.points.len();
        let global = self.peak()?;
        for (i, p) in self.points.iter().enumerate() {
            if p.p_success < 0.5 * global.p_success {
                continue;
            }
            let rising = i == 0 || self.points[i - 1].p_success <= p.p_success;
            let falling = i + 1 >= n || self.points[i + 1].p_success <= p.p_success;
            if rising && falling {
                return Some(*p);
            }
        }
        Some(global)
    }

    /// Local maxima (interior comparisons only), for oscillation checks.
    pub fn local_maxima(&self) -> Vec<TrajectoryPoint> {
        let n = self.points.len();
        let mut out = Vec::new();
        for i in 0..n {
            let p = self.points[i];
            let rising = i == 0 || self.points[i - 1].p_success <= p.p_success;
            let falling = i + 1 >= n || self.points[i + 1].p_success <= p.p_success;
            if rising && falling {
                out.push(p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(ps: &[f64]) -> Trajectory {
        let mut t = Trajectory::new();
        for (i, &p) in ps.iter().enumerate() {
            t.push(TrajectoryPoint {
                t: (i + 1) as u32,
                p_success: p,
                p_gap: 0.0,
            });
        }
        t
    }

    #[test]
    fn peak_prefers_earliest_on_tie() {
        let t = traj(&[0.1, 0.9, 0.2, 0.9]);
        assert_eq!(t.peak().unwrap().t, 2);
    }

    #[test]
    fn first_peak_ignores_marginally_higher_later_peak() {
        // second oscillation peak is higher by a hair; first local max wins
        let t = traj(&[0.2, 0.5, 0.80, 0.6, 0.2, 0.4, 0.7, 0.801, 0.5]);
        assert_eq!(t.first_peak().unwrap().t, 3);
        assert_eq!(t.peak().unwrap().t, 8);
    }

    #[test]
    fn first_peak_skips_low_ripples() {
        let t = traj(&[0.05, 0.02, 0.3, 0.6, 0.9, 0.4]);
        assert_eq!(t.first_peak().unwrap().t, 5);
    }

    #[test]
    fn empty_trajectory_has_no_peak() {
        assert!(traj(&[]).peak().is_none());
    }
}
