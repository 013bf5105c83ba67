//! Energy-flow-assisted amplify-and-forward relaying.
//!
//! A single-antenna source talks to a single-antenna destination through an
//! `r`-antenna half-duplex relay that powers itself by power splitting. In the
//! energy-flow-assisted protocol the destination also beams an energy signal to
//! the relay during the first phase. This crate evaluates and optimizes the
//! protocol and its baselines:
//!
//! - [`siso`]: optimal splitting ratio for a single-antenna relay, in closed
//!   form and through an interior-point solve of the transformed convex program;
//! - [`mimo`]: optimal relay matrix per splitting ratio (generalized Rayleigh
//!   quotient), grid search over the ratio, genie-aided and MRC/MRT variants;
//! - [`oracles`]: brute-force and sampling verifiers independent of the
//!   optimized paths;
//! - [`experiments`]: seeded, paired Monte Carlo sweeps with CSV output.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`, which the experiments and tolerances assume.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiments;
pub mod fractional;
pub mod linalg;
pub mod mimo;
pub mod oracles;
pub mod scalar;
pub mod siso;

pub use error::{Error, Result};
pub use mimo::Variant;
pub use scalar::Real;

pub type ComplexVector = linalg::Vector<f64>;
pub type ComplexMatrix = linalg::Matrix<f64>;
pub type EigenPair = linalg::EigenPair<f64>;
pub type Geometry = channel::Geometry<f64>;
pub type PowerBudget = channel::PowerBudget<f64>;
pub type NoiseModel = channel::NoiseModel<f64>;
pub type ChannelRealization = channel::ChannelRealization<f64>;
pub type SisoChannel = siso::SisoChannel<f64>;
pub type SisoSolution = siso::SisoSolution<f64>;
pub type MimoBase = mimo::MimoBase<f64>;
pub type MimoProblem = mimo::MimoProblem<f64>;
pub type MimoSolution = mimo::MimoSolution<f64>;
pub type KroneckerOperators = mimo::KroneckerOperators<f64>;
pub type DiagnosticsReport = mimo::DiagnosticsReport<f64>;

pub type ComplexVector32 = linalg::Vector<f32>;
pub type ComplexMatrix32 = linalg::Matrix<f32>;
