//! Exact simulation toolkit for loss-tolerant all-photonic quantum repeaters
//! built from generalized Shor (quantum parity) codes.
//!
//! The numerical core is generic over [`Scalar`] (`f64` and `f32`); the
//! aliases below fix the usual `f64` instantiation.

pub mod error;
pub mod photonics;
pub mod qsim;
pub mod rate;
pub mod rgs;
pub mod rng;
pub mod scalar;
pub mod shor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PureState = qsim::PureState<f64>;
pub type DensityMatrix = qsim::DensityMatrix<f64>;
pub type QState = qsim::QState<f64>;
pub type Gate = qsim::Gate<f64>;
pub type LogicalInput = shor::LogicalInput<f64>;
pub type WitnessResult = rgs::WitnessResult<f64>;
pub type RateModel = rate::RateModel<f64>;
pub type RateModelF32 = rate::RateModel<f32>;

pub type PureStateF32 = qsim::PureState<f32>;
pub type DensityMatrixF32 = qsim::DensityMatrix<f32>;

