//! Full-space reference simulator on the m-dimensional hypercube.
//!
//! States live on `coin (x) vertex` with `m * 2^m` amplitudes, laid out as
//! `amp[v * m + d]` for vertex `v` and coin direction `d` (direction `d`
//! flips vertex bit `d`). Operators are applied matrix-free; nothing of
//! size `(m 2^m)^2` is ever materialized. This module is the ground-truth
//! oracle for the collapsed walk and the home of the bit-swap symmetry
//! checks.

use crate::collapsed::{binomial, idx_l, idx_r, CollapsedState};
use crate::config::{ConfigError, WalkConfig};
use crate::trajectory::{Trajectory, TrajectoryPoint};
use crate::C64;
use thiserror::Error;

/// Largest hypercube dimension the dense representation accepts.
pub const MAX_FULL_SPACE_M: u32 = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypercubeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("marked vertex {vertex} out of range for dimension {m}")]
    MarkedOutOfRange { vertex: u64, m: u32 },
    #[error("bit index {index} out of range 1..={m}")]
    BitIndexOutOfRange { index: u32, m: u32 },
    #[error("bit indices must differ, both are {0}")]
    EqualBitIndices(u32),
    #[error("state breaks bit-swap symmetry (deviation {deviation:.3e} at bit pair {i},{j})")]
    AsymmetricState { deviation: f64, i: u32, j: u32 },
}

/// Marked vertex of the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkedSpec {
    vertex: u64,
}

impl MarkedSpec {
    pub fn new(vertex: u64, cfg: &WalkConfig) -> Result<Self, HypercubeError> {
        if vertex >> cfg.m() != 0 {
            return Err(HypercubeError::MarkedOutOfRange {
                vertex,
                m: cfg.m(),
            });
        }
        Ok(Self { vertex })
    }

    pub fn origin() -> Self {
        Self { vertex: 0 }
    }

    pub fn vertex(&self) -> u64 {
        self.vertex
    }
}

/// Dense amplitude vector over coin (x) vertex space.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    m: u32,
    amp: Vec<C64>,
}

fn guard_dimension(cfg: &WalkConfig) -> Result<(), ConfigError> {
    if cfg.m() > MAX_FULL_SPACE_M {
        return Err(ConfigError::DimensionTooLargeForFullSpace(
            cfg.m(),
            MAX_FULL_SPACE_M,
        ));
    }
    Ok(())
}

impl FullState {
    pub fn zero(cfg: &WalkConfig) -> Result<Self, ConfigError> {
        guard_dimension(cfg)?;
        let m = cfg.m();
        Ok(Self {
            m,
            amp: vec![C64::new(0.0, 0.0); (m as usize) << m],
        })
    }

    /// Uniform superposition over all coin directions and all vertices of
    /// even Hamming weight (the database embedding), renormalized.
    pub fn initial(cfg: &WalkConfig) -> Result<Self, ConfigError> {
        guard_dimension(cfg)?;
        let m = cfg.m();
        let verts = 1usize << m;
        let a = 1.0 / ((m as f64) * (verts as f64 / 2.0)).sqrt();
        let mut amp = vec![C64::new(0.0, 0.0); m as usize * verts];
        for v in 0..verts {
            if (v as u64).count_ones().is_multiple_of(2) {
                for d in 0..m as usize {
                    amp[v * m as usize + d] = C64::new(a, 0.0);
                }
            }
        }
        Ok(Self { m, amp })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amp
    }

    pub fn amp_at(&self, d: u32, v: u64) -> C64 {
        self.amp[v as usize * self.m as usize + d as usize]
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of measuring vertex `v` (summed over the coin).
    pub fn vertex_probability(&self, v: u64) -> f64 {
        let base = v as usize * self.m as usize;
        self.amp[base..base + self.m as usize]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Projector onto even-Hamming-weight vertices, renormalizing the
    /// survivor. Exposed for testing the database embedding.
    pub fn project_even_weight(&mut self) {
        let m = self.m as usize;
        for v in 0..(1usize << self.m) {
            if !(v as u64).count_ones().is_multiple_of(2) {
                for d in 0..m {
                    self.amp[v * m + d] = C64::new(0.0, 0.0);
                }
            }
        }
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amp {
                *a /= n;
            }
        }
    }

    /// Coin-conditioned move: amplitude at `(d, v)` goes to `(d, v ^ e_d)`.
    /// An involution, applied in place.
    pub fn apply_shift(&mut self) {
        let m = self.m as usize;
        let verts = 1usize << self.m;
        for d in 0..m {
            let bit = 1usize << d;
            for v in 0..verts {
                if v & bit == 0 {
                    self.amp.swap(v * m + d, (v | bit) * m + d);
                }
            }
        }
    }

    /// Diffusion coin on every vertex; at the marked vertex (when given)
    /// the exact phase flip `-I` replaces it. Each vertex block maps to
    /// `(1 + e^{i delta}) mean(block) - block`.
    pub fn apply_coin(&mut self, cfg: &WalkConfig, marked: Option<&MarkedSpec>) {
        let m = self.m as usize;
        let verts = 1usize << self.m;
        let f = cfg.coin_coefficient();
        let inv_m = 1.0 / m as f64;
        for v in 0..verts {
            let block = &mut self.amp[v * m..(v + 1) * m];
            if marked.is_some_and(|mk| mk.vertex() == v as u64) {
                for a in block {
                    *a = -*a;
                }
            } else {
                let mean = block.iter().sum::<C64>() * inv_m;
                let fm = f * mean;
                for a in block {
                    *a = fm - *a;
                }
            }
        }
    }

    /// One full search iteration: marked coin, shift, plain coin, shift.
    pub fn step(&mut self, cfg: &WalkConfig, marked: &MarkedSpec) {
        self.apply_coin(cfg, Some(marked));
        self.apply_shift();
        self.apply_coin(cfg, None);
        self.apply_shift();
    }

    /// Simultaneous swap of vertex bits `i`, `j` and coin directions `i`,
    /// `j` (1-based). Self-inverse.
    pub fn apply_bit_swap(&self, i: u32, j: u32) -> Result<FullState, HypercubeError> {
        let m = self.m;
        for &k in &[i, j] {
            if k < 1 || k > m {
                return Err(HypercubeError::BitIndexOutOfRange { index: k, m });
            }
        }
        if i == j {
            return Err(HypercubeError::EqualBitIndices(i));
        }
        let (bi, bj) = ((i - 1) as usize, (j - 1) as usize);
        let mm = m as usize;
        let mut out = vec![C64::new(0.0, 0.0); self.amp.len()];
        for v in 0..(1usize << m) {
            let swapped_v = swap_bits(v, bi, bj);
            for d in 0..mm {
                let swapped_d = if d == bi {
                    bj
                } else if d == bj {
                    bi
                } else {
                    d
                };
                out[v * mm + d] = self.amp[swapped_v * mm + swapped_d];
            }
        }
        Ok(FullState { m, amp: out })
    }

    /// Project onto the `2m` shell-symmetric basis vectors. Requires the
    /// state to be symmetric under every bit-pair swap (checked to
    /// `1e-10`); the collapse then preserves the norm.
    pub fn collapse(&self) -> Result<CollapsedState, HypercubeError> {
        let m = self.m;
        for i in 1..=m {
            for j in (i + 1)..=m {
                let swapped = self.apply_bit_swap(i, j)?;
                let dev = self
                    .amp
                    .iter()
                    .zip(&swapped.amp)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                if dev > 1e-10 {
                    return Err(HypercubeError::AsymmetricState {
                        deviation: dev,
                        i,
                        j,
                    });
                }
            }
        }
        Ok(self.collapse_unchecked())
    }

    /// Collapse without the symmetry pre-check.
    pub fn collapse_unchecked(&self) -> CollapsedState {
        let m = self.m;
        let mm = m as usize;
        // sum of amplitudes per (shell, direction class)
        let mut sum_r = vec![C64::new(0.0, 0.0); mm + 1];
        let mut sum_l = vec![C64::new(0.0, 0.0); mm + 1];
        for v in 0..(1u64 << m) {
            let x = v.count_ones() as usize;
            let base = v as usize * mm;
            for d in 0..mm {
                if v & (1u64 << d) == 0 {
                    sum_r[x] += self.amp[base + d];
                } else {
                    sum_l[x] += self.amp[base + d];
                }
            }
        }
        let mut amp = vec![C64::new(0.0, 0.0); 2 * mm];
        for x in 0..=m {
            // |R,x> spreads over C(m,x)(m-x) coordinates, |L,x> over C(m,x)x
            if x < m {
                let w = (binomial(m, x) * (m - x) as f64).sqrt();
                amp[idx_r(x)] = sum_r[x as usize] / w;
            }
            if x > 0 {
                let w = (binomial(m, x) * x as f64).sqrt();
                amp[idx_l(x)] = sum_l[x as usize] / w;
            }
        }
        CollapsedState::from_amplitudes(m, amp)
    }
}

fn swap_bits(v: usize, i: usize, j: usize) -> usize {
    let bi = (v >> i) & 1;
    let bj = (v >> j) & 1;
    if bi == bj {
        v
    } else {
        v ^ ((1 << i) | (1 << j))
    }
}

/// Run the full-space search, recording marked-vertex probability and the
/// vertex-marginal probability gap after every iteration.
pub fn evolve_full(
    cfg: &WalkConfig,
    marked: &MarkedSpec,
    t_max: u32,
) -> Result<Trajectory, HypercubeError> {
    let mut state = FullState::initial(cfg)?;
    let mut traj = Trajectory::new();
    for t in 1..=t_max {
        state.step(cfg, marked);
        traj.push(TrajectoryPoint {
            t,
            p_success: state.vertex_probability(marked.vertex()),
            p_gap: full_gap(&state, marked),
        });
    }
    Ok(traj)
}

/// Marked-vertex probability minus the maximum among all other vertices.
pub fn full_gap(state: &FullState, marked: &MarkedSpec) -> f64 {
    let verts = 1u64 << state.m();
    let p_marked = state.vertex_probability(marked.vertex());
    let mut rest: f64 = 0.0;
    for v in 0..verts {
        if v != marked.vertex() {
            rest = rest.max(state.vertex_probability(v));
        }
    }
    p_marked - rest
}

/// Maximum deviation of `P^+ (U U') P - U U'` over the full standard basis,
/// where `P` swaps vertex bits `i`, `j` together with coin directions `i`,
/// `j`. Exact bit-swap symmetry of the search step makes this vanish for
/// the marked vertex at the origin.
pub fn permutation_conjugation_check(
    cfg: &WalkConfig,
    i: u32,
    j: u32,
) -> Result<f64, HypercubeError> {
    guard_dimension(cfg).map_err(HypercubeError::Config)?;
    let marked = MarkedSpec::origin();
    let m = cfg.m();
    let dim = (m as usize) << m;
    // validate indices once on a probe state
    let probe = FullState::zero(cfg)?;
    probe.apply_bit_swap(i, j)?;
    let mut worst: f64 = 0.0;
    for k in 0..dim {
        let mut e = FullState::zero(cfg)?;
        e.amplitudes_mut()[k] = C64::new(1.0, 0.0);

        let mut direct = e.clone();
        direct.step(cfg, &marked);

        let mut conjugated = e.apply_bit_swap(i, j)?;
        conjugated.step(cfg, &marked);
        let conjugated = conjugated.apply_bit_swap(i, j)?;

        let dev = direct
            .amplitudes()
            .iter()
            .zip(conjugated.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    Ok(worst)
}
