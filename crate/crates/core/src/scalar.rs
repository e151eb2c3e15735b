//! Floating-point scalar abstraction shared by every simulation module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar type backing amplitudes, probabilities and rates.
///
/// The tolerances are the single place where exactness checks are configured:
/// `exact_tol` is used for normalization, unitarity, Hermiticity and
/// fidelity-one checks, `psd_tol` is the slack allowed on negative eigenvalues.
pub trait Scalar:
    Float
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    const EXACT_TOL: f64;
    const PSD_TOL: f64;
    /// Probability below which a forced outcome is rejected.
    const MIN_BRANCH_PROB: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn exact_tol() -> Self {
        Self::lit(Self::EXACT_TOL)
    }

    fn psd_tol() -> Self {
        Self::lit(Self::PSD_TOL)
    }

    fn min_branch_prob() -> Self {
        Self::lit(Self::MIN_BRANCH_PROB)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    const EXACT_TOL: f64 = 1e-10;
    const PSD_TOL: f64 = 1e-9;
    const MIN_BRANCH_PROB: f64 = 1e-12;
}

impl Scalar for f32 {
    const EXACT_TOL: f64 = 1e-5;
    const PSD_TOL: f64 = 1e-4;
    const MIN_BRANCH_PROB: f64 = 1e-6;
}
