//! The walk in the symmetry-collapsed line basis.
//!
//! Bit-swap symmetry (simultaneous permutation of vertex bits and coin
//! directions) reduces the `m * 2^m`-dimensional walk started from the
//! even-weight superposition to a line walk on `2m` basis states
//!
//! ```text
//! |R,0>, |L,1>, |R,1>, |L,2>, ..., |R,m-1>, |L,m>
//! ```
//!
//! where `|R,x>` collects amplitude at Hamming shell `x` with the coin
//! pointing toward higher weight, and `|L,x>` toward lower weight. The
//! marked vertex sits alone in shell 0, so the search success probability
//! is `|<R,0|psi>|^2`.

use crate::cmatrix::CMatrix;
use crate::config::{ConfigError, WalkConfig};
use crate::trajectory::{Trajectory, TrajectoryPoint};
use crate::C64;

/// Binomial coefficient as f64; exact for the sizes used here (m <= 64).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Index of `|R,x>` in the interleaved layout, valid for `0 <= x < m`.
#[inline]
pub fn idx_r(x: u32) -> usize {
    2 * x as usize
}

/// Index of `|L,x>` in the interleaved layout, valid for `1 <= x <= m`.
#[inline]
pub fn idx_l(x: u32) -> usize {
    2 * x as usize - 1
}

/// Complex amplitudes over the `2m` line basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapsedState {
    m: u32,
    amp: Vec<C64>,
}

impl CollapsedState {
    pub fn from_amplitudes(m: u32, amp: Vec<C64>) -> Self {
        assert_eq!(amp.len(), 2 * m as usize);
        Self { m, amp }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    /// Amplitude on `|R,x>` (zero x = the marked shell).
    pub fn amp_r(&self, x: u32) -> C64 {
        assert!(x < self.m);
        self.amp[idx_r(x)]
    }

    /// Amplitude on `|L,x>`.
    pub fn amp_l(&self, x: u32) -> C64 {
        assert!(x >= 1 && x <= self.m);
        self.amp[idx_l(x)]
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &CollapsedState) -> C64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability of measuring the marked vertex, `|<R,0|psi>|^2`.
    pub fn success_probability(&self) -> f64 {
        self.amp[0].norm_sqr()
    }

    /// Marked-vertex probability minus the largest per-vertex probability
    /// among all other vertices. Within a shell the bit-swap symmetry
    /// shares the shell probability equally among its `C(m,x)` vertices.
    pub fn probability_gap(&self) -> f64 {
        let m = self.m;
        let marked = self.success_probability();
        let mut rest: f64 = 0.0;
        for x in 1..=m {
            let mut shell = self.amp[idx_l(x)].norm_sqr();
            if x < m {
                shell += self.amp[idx_r(x)].norm_sqr();
            }
            rest = rest.max(shell / binomial(m, x));
        }
        marked - rest
    }

    pub fn scaled(&self, factor: C64) -> CollapsedState {
        CollapsedState {
            m: self.m,
            amp: self.amp.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn sub(&self, other: &CollapsedState) -> CollapsedState {
        CollapsedState {
            m: self.m,
            amp: self
                .amp
                .iter()
                .zip(&other.amp)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Restriction of the diffusion coin to the shell-symmetric coin pair at
/// one Hamming shell. Shells 0 and `m` hold a single coin direction class,
/// so the block degenerates to a scalar there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinBlock {
    /// 1x1 block at shells 0 and m: `(1 - e^{i theta}) - 1`.
    Scalar(C64),
    /// 2x2 block in the (up = R, down = L) basis.
    Block {
        up_up: C64,
        down_down: C64,
        off_diag: C64,
    },
}

impl CoinBlock {
    /// Max-norm of `B B^H - I`.
    pub fn unitarity_defect(&self) -> f64 {
        match *self {
            CoinBlock::Scalar(s) => (s.norm_sqr() - 1.0).abs(),
            CoinBlock::Block {
                up_up,
                down_down,
                off_diag,
            } => {
                let a = up_up;
                let b = off_diag;
                let c = off_diag;
                let d = down_down;
                let e00 = a * a.conj() + b * b.conj() - 1.0;
                let e01 = a * c.conj() + b * d.conj();
                let e10 = c * a.conj() + d * b.conj();
                let e11 = c * c.conj() + d * d.conj() - 1.0;
                [e00, e01, e10, e11]
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// Errors from collapsed-walk operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CollapsedError {
    #[error("shell index {x} out of range 0..={m}")]
    ShellOutOfRange { x: u32, m: u32 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Diffusion-coin block at shell `x`.
///
/// In the symmetric pair basis the rank-one coin `(1-e^{i theta})|s><s| - I`
/// restricts to entries built from the shell's up/down degree split:
/// up-up `(1-e^{i theta})(m-x)/m - 1`, down-down `(1-e^{i theta})x/m - 1`,
/// off-diagonal `(1-e^{i theta}) sqrt(x(m-x))/m`.
pub fn coin_block(x: u32, cfg: &WalkConfig) -> Result<CoinBlock, CollapsedError> {
    let m = cfg.m();
    if x > m {
        return Err(CollapsedError::ShellOutOfRange { x, m });
    }
    let f = cfg.coin_coefficient();
    if x == 0 || x == m {
        return Ok(CoinBlock::Scalar(f - 1.0));
    }
    let mf = m as f64;
    let xf = x as f64;
    Ok(CoinBlock::Block {
        up_up: f * ((mf - xf) / mf) - 1.0,
        down_down: f * (xf / mf) - 1.0,
        off_diag: f * ((xf * (mf - xf)).sqrt() / mf),
    })
}

/// The two collapsed step operators.
#[derive(Debug, Clone)]
pub struct StepOperators {
    /// Plain walk step: shift times block-diagonal diffusion coin.
    pub unmarked: CMatrix,
    /// Search step: the plain step with the marked-vertex coin (exact
    /// phase flip) substituted at shell 0, which amounts to subtracting
    /// `(1 - e^{i theta}) |L,1><R,0|`.
    pub marked: CMatrix,
}

/// Build the `2m x 2m` collapsed step operators analytically.
pub fn step_operators(cfg: &WalkConfig) -> StepOperators {
    let m = cfg.m();
    let n = cfg.collapsed_dim();
    let mut coin = CMatrix::zeros(n);
    for x in 0..=m {
        match coin_block(x, cfg).expect("shell in range") {
            CoinBlock::Scalar(s) => {
                let i = if x == 0 { idx_r(0) } else { idx_l(m) };
                coin[(i, i)] = s;
            }
            CoinBlock::Block {
                up_up,
                down_down,
                off_diag,
            } => {
                let r = idx_r(x);
                let l = idx_l(x);
                coin[(r, r)] = up_up;
                coin[(l, l)] = down_down;
                coin[(r, l)] = off_diag;
                coin[(l, r)] = off_diag;
            }
        }
    }
    // Shift: |R,x> -> |L,x+1>, |L,x> -> |R,x-1>.
    let mut shift = CMatrix::zeros(n);
    for x in 0..m {
        shift[(idx_l(x + 1), idx_r(x))] = C64::new(1.0, 0.0);
    }
    for x in 1..=m {
        shift[(idx_r(x - 1), idx_l(x))] = C64::new(1.0, 0.0);
    }
    let unmarked = shift.mul(&coin);
    let mut marked = unmarked.clone();
    marked[(idx_l(1), idx_r(0))] -= cfg.coin_coefficient();
    StepOperators { unmarked, marked }
}

/// Even-weight projection state for any `m >= 2`: the collapse of the
/// uniform superposition over coin directions and even-Hamming-weight
/// vertices. The amplitude on `|R,x>` is `sqrt(C(m-1,x) / 2^(m-1))` and on
/// `|L,x>` is `sqrt(C(m-1,x-1) / 2^(m-1))`, for even shells `x` only.
pub fn even_projection_state(m: u32) -> CollapsedState {
    let db = (1u64 << (m - 1)) as f64;
    let mut amp = vec![C64::new(0.0, 0.0); 2 * m as usize];
    let mut x = 0u32;
    while x <= m {
        if x < m {
            amp[idx_r(x)] = C64::new((binomial(m - 1, x) / db).sqrt(), 0.0);
        }
        if x > 0 {
            amp[idx_l(x)] = C64::new((binomial(m - 1, x - 1) / db).sqrt(), 0.0);
        }
        x += 2;
    }
    CollapsedState::from_amplitudes(m, amp)
}

/// Initial state of the search in the collapsed basis (even `m`).
///
/// Closed form over even shells: `1/sqrt(2^(m-1))` on `|R,0>` and `|L,m>`,
/// `sqrt(C(m-1,2x)/2^(m-1))` on `|R,2x>` and `sqrt(C(m-1,2x-1)/2^(m-1))`
/// on `|L,2x>`. For odd `m` the same projection exists but not this
/// binomial form; use [`even_projection_state`] or collapse the full-space
/// initial state instead.
pub fn initial_state(cfg: &WalkConfig) -> Result<CollapsedState, ConfigError> {
    cfg.require_even()?;
    Ok(even_projection_state(cfg.m()))
}

/// Run the search for `t_max` iterations, recording success probability and
/// probability gap after every full iteration (marked step, then plain
/// step). Deterministic: same inputs give bit-identical trajectories.
pub fn evolve(cfg: &WalkConfig, t_max: u32) -> Trajectory {
    evolve_with_state(cfg, t_max).0
}

/// As [`evolve`] but also returns the final state.
pub fn evolve_with_state(cfg: &WalkConfig, t_max: u32) -> (Trajectory, CollapsedState) {
    let ops = step_operators(cfg);
    let mut state = even_projection_state(cfg.m());
    let mut traj = Trajectory::new();
    for t in 1..=t_max {
        let half = ops.marked.mul_vec(state.amplitudes());
        let full = ops.unmarked.mul_vec(&half);
        state = CollapsedState::from_amplitudes(cfg.m(), full);
        traj.push(TrajectoryPoint {
            t,
            p_success: state.success_probability(),
            p_gap: state.probability_gap(),
        });
    }
    (traj, state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: u32, delta: f64) -> WalkConfig {
        WalkConfig::new(m, delta).unwrap()
    }

    #[test]
    fn coin_block_error_free_fixes_uniform_coin_at_marked_shell() {
        // shell 0 of the error-free coin is the scalar +1
        match coin_block(0, &cfg(8, 0.0)).unwrap() {
            CoinBlock::Scalar(s) => {
                assert!((s - C64::new(1.0, 0.0)).norm() < 1e-15);
            }
            _ => panic!("expected scalar block"),
        }
    }

    #[test]
    fn coin_block_balanced_shell_is_a_swap() {
        match coin_block(4, &cfg(8, 0.0)).unwrap() {
            CoinBlock::Block {
                up_up,
                down_down,
                off_diag,
            } => {
                assert!(up_up.norm() < 1e-15);
                assert!(down_down.norm() < 1e-15);
                assert!((off_diag - C64::new(1.0, 0.0)).norm() < 1e-15);
            }
            _ => panic!("expected 2x2 block"),
        }
    }

    #[test]
    fn coin_block_errored_marked_shell_scalar_is_a_pure_phase() {
        match coin_block(0, &cfg(8, 0.3)).unwrap() {
            CoinBlock::Scalar(s) => {
                let expect = C64::from_polar(1.0, 0.3);
                assert!((s - expect).norm() < 1e-15);
                assert!((s.norm() - 1.0).abs() < 1e-15);
            }
            _ => panic!("expected scalar block"),
        }
    }

    #[test]
    fn coin_block_rejects_out_of_range_shell() {
        assert_eq!(
            coin_block(9, &cfg(8, 0.0)).unwrap_err(),
            CollapsedError::ShellOutOfRange { x: 9, m: 8 }
        );
    }

    #[test]
    fn coin_blocks_unitary_for_various_deltas() {
        for &d in &[0.0, 0.1, -0.5, 1.0, 3.0] {
            let c = cfg(8, d);
            for x in 0..=8 {
                let defect = coin_block(x, &c).unwrap().unitarity_defect();
                assert!(defect < 1e-12, "x={x} delta={d}: defect {defect}");
            }
        }
    }

    #[test]
    fn marked_step_sends_marked_shell_to_negated_left_one() {
        // the marked coin is an exact phase flip regardless of delta
        for &(m, d) in &[(4u32, 0.0), (8, 0.3)] {
            let ops = step_operators(&cfg(m, d));
            let mut basis = vec![C64::new(0.0, 0.0); 2 * m as usize];
            basis[idx_r(0)] = C64::new(1.0, 0.0);
            let out = ops.marked.mul_vec(&basis);
            for (i, v) in out.iter().enumerate() {
                let expect = if i == idx_l(1) {
                    C64::new(-1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((v - expect).norm() < 1e-14, "m={m} d={d} i={i}");
            }
        }
    }

    #[test]
    fn unmarked_step_phases_marked_shell() {
        let ops = step_operators(&cfg(8, 0.3));
        let mut basis = vec![C64::new(0.0, 0.0); 16];
        basis[idx_r(0)] = C64::new(1.0, 0.0);
        let out = ops.unmarked.mul_vec(&basis);
        let expect = C64::from_polar(1.0, 0.3);
        assert!((out[idx_l(1)] - expect).norm() < 1e-14);
    }

    #[test]
    fn step_operators_have_unit_columns() {
        for &d in &[0.0, 0.2, 0.7] {
            let ops = step_operators(&cfg(8, d));
            for n in ops.unmarked.col_norms().into_iter().chain(ops.marked.col_norms()) {
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn step_operators_unitary() {
        for &d in &[0.0, 0.3, 1.0] {
            let ops = step_operators(&cfg(6, d));
            assert!(ops.unmarked.unitarity_defect() < 1e-12);
            assert!(ops.marked.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn initial_state_closed_form_values() {
        let s = initial_state(&cfg(8, 0.0)).unwrap();
        let expect_r0 = 1.0 / 128f64.sqrt();
        assert!((s.amp_r(0).re - expect_r0).abs() < 1e-15);
        assert!((s.amp_r(0).re - 0.088_388_347_648_31).abs() < 1e-12);
        assert!((s.norm() - 1.0).abs() < 1e-12);

        let s4 = initial_state(&cfg(4, 0.0)).unwrap();
        assert!((s4.amp_l(2).re - (3.0f64 / 8.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn initial_state_rejects_odd_dimension() {
        assert_eq!(
            initial_state(&cfg(5, 0.0)).unwrap_err(),
            ConfigError::OddDimension(5)
        );
    }

    #[test]
    fn even_projection_state_is_normalized_for_odd_m() {
        for m in [3, 5, 7, 9] {
            let s = even_projection_state(m);
            assert!((s.norm() - 1.0).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn success_probability_of_initial_state() {
        let s = initial_state(&cfg(8, 0.0)).unwrap();
        assert!((s.success_probability() - 1.0 / 128.0).abs() < 1e-15);
    }

    #[test]
    fn gap_of_point_mass_is_one() {
        let mut amp = vec![C64::new(0.0, 0.0); 8];
        amp[0] = C64::new(1.0, 0.0);
        let s = CollapsedState::from_amplitudes(4, amp);
        assert!((s.probability_gap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gap_matches_direct_enumeration_on_uniform_state() {
        // uniform over all 8 labels at m=4, gap by brute force over shells
        let m = 4u32;
        let amp = vec![C64::new(1.0 / 8f64.sqrt(), 0.0); 8];
        let s = CollapsedState::from_amplitudes(m, amp.clone());
        let p0 = amp[0].norm_sqr();
        let mut rest: f64 = 0.0;
        for x in 1..=m {
            let mut shell = amp[idx_l(x)].norm_sqr();
            if x < m {
                shell += amp[idx_r(x)].norm_sqr();
            }
            rest = rest.max(shell / binomial(m, x));
        }
        assert!((s.probability_gap() - (p0 - rest)).abs() < 1e-15);
        // the single-vertex shell 4 dominates: its one label holds 1/8
        assert!((rest - 0.125).abs() < 1e-15);
    }

    #[test]
    fn evolve_zero_steps_is_empty() {
        assert!(evolve(&cfg(4, 0.0), 0).is_empty());
    }

    #[test]
    fn evolve_preserves_norm() {
        let (_, state) = evolve_with_state(&cfg(8, 0.2), 25);
        assert!((state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_is_deterministic() {
        let a = evolve(&cfg(8, 0.1), 20);
        let b = evolve(&cfg(8, 0.1), 20);
        for (x, y) in a.points().iter().zip(b.points()) {
            assert_eq!(x.p_success.to_bits(), y.p_success.to_bits());
            assert_eq!(x.p_gap.to_bits(), y.p_gap.to_bits());
        }
    }
}
