//! Simulation and analysis toolkit for the coined quantum-walk search
//! algorithm on the hypercube, with systematic phase errors in the
//! diffusion coin.
//!
//! The searched database of size `2^(m-1)` is embedded (via a parity bit)
//! into the even-Hamming-weight vertices of the `m`-dimensional hypercube.
//! One search iteration applies the marked walk step followed by the plain
//! walk step; the phase error `delta` perturbs the Grover diffusion coin,
//! whose phase becomes `theta = pi + delta`.
//!
//! Modules:
//! - [`config`]: the `(m, delta)` parameter record all operators consume.
//! - [`collapsed`]: the walk in the bit-swap-symmetric `2m`-dimensional
//!   line basis, the workhorse representation for large-`m` experiments.
//! - [`hypercube`]: the full `m * 2^m`-dimensional reference simulator used
//!   as a ground-truth oracle and for symmetry checks.
//! - [`eigen`]: dense complex eigensolver (Hessenberg reduction + shifted
//!   QR) for the `2m x 2m` step operators.
//! - [`spectral`]: eigenvalue spectra, near-unit classification, analytic
//!   rotation-plane vectors and the amplitude-decomposition error model.
//! - [`model`]: closed-form success-rate / iteration-count / probability-gap
//!   models and the critical database scale.
//! - [`fit`]: deterministic least-squares refitting of the model constants
//!   from simulation sweeps.
//! - [`grover`]: Grover's algorithm with the same class of systematic phase
//!   error, for the robustness comparison.

pub mod cmatrix;
pub mod collapsed;
pub mod config;
pub mod eigen;
pub mod fit;
pub mod grover;
pub mod hypercube;
pub mod model;
pub mod spectral;
pub mod trajectory;

pub use cmatrix::CMatrix;
pub use collapsed::{CoinBlock, CollapsedState, StepOperators};
pub use config::{ConfigError, WalkConfig};
pub use fit::{FitError, FitResult};
pub use grover::GroverState;
pub use hypercube::{FullState, MarkedSpec};
pub use model::ModelParams;
pub use spectral::{AmplitudeDecomposition, RotationPlane, SpectrumReport};
pub use trajectory::{Trajectory, TrajectoryPoint};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
