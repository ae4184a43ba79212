//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};

/// Floating-point scalar the tensor kernels are generic over.
///
/// `f32` is the training/inference precision, `f64` the verification
/// precision used by the finite-difference gradient checks.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless conversion from `f64` (lossy for `f32`, by rounding).
    fn from_f64(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("finite f64 converts")
    }

    /// Widening conversion to `f64`.
    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}
