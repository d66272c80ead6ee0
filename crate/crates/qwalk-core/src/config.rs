//! Walk parameters shared by every operator.

use std::f64::consts::PI;
use thiserror::Error;

/// Errors raised when constructing or using a [`WalkConfig`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("hypercube dimension must be at least 2, got {0}")]
    DimensionTooSmall(u32),
    #[error("phase error must satisfy |delta| < pi, got {0}")]
    DeltaOutOfRange(f64),
    #[error("operation requires even hypercube dimension, got {0}")]
    OddDimension(u32),
    #[error("operation requires hypercube dimension divisible by 4, got {0}")]
    DimensionNotMultipleOf4(u32),
    #[error("dimension {0} too large for the dense full-space representation (max {1})")]
    DimensionTooLargeForFullSpace(u32, u32),
}

/// Hypercube dimension and systematic coin phase error.
///
/// The vertex register holds `2^m` basis states; the searched database of
/// size `2^(m-1)` occupies the even-Hamming-weight vertices. The diffusion
/// coin phase is `theta = pi + delta`; `delta = 0` is the error-free walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    m: u32,
    delta: f64,
}

impl WalkConfig {
    pub fn new(m: u32, delta: f64) -> Result<Self, ConfigError> {
        if m < 2 {
            return Err(ConfigError::DimensionTooSmall(m));
        }
        if !delta.is_finite() || delta.abs() >= PI {
            return Err(ConfigError::DeltaOutOfRange(delta));
        }
        Ok(Self { m, delta })
    }

    /// Hypercube dimension.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Systematic phase error in radians.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Diffusion coin phase, always `pi + delta`.
    pub fn theta(&self) -> f64 {
        PI + self.delta
    }

    /// `1 - e^{i theta} = 1 + e^{i delta}`, the coefficient of the
    /// rank-one part of the errored diffusion coin.
    pub fn coin_coefficient(&self) -> super::C64 {
        1.0 - super::C64::from_polar(1.0, self.theta())
    }

    /// Size of the searched database, `2^(m-1)`.
    pub fn database_size(&self) -> u64 {
        1u64 << (self.m - 1)
    }

    /// Number of collapsed line-basis states, `2m`.
    pub fn collapsed_dim(&self) -> usize {
        2 * self.m as usize
    }

    pub fn require_even(&self) -> Result<(), ConfigError> {
        if !self.m.is_multiple_of(2) {
            return Err(ConfigError::OddDimension(self.m));
        }
        Ok(())
    }

    pub fn require_multiple_of_4(&self) -> Result<(), ConfigError> {
        if !self.m.is_multiple_of(4) {
            return Err(ConfigError::DimensionNotMultipleOf4(self.m));
        }
        Ok(())
    }
}
