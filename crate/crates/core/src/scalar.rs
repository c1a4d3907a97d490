//! Scalar abstraction shared by the simulator and the statistics code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the numeric kernels are generic over: `f32` or `f64`.
///
/// Tolerances quoted throughout the crate (1e-10 norm drift, 1e-8 p-value
/// error) hold for `f64`; `f32` is supported for cheaper experiments and
/// gets the looser [`Real::tolerance`].
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Machine epsilon scaled to a comfortable comparison tolerance.
    fn tolerance() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to every Real")
    }
}

impl Real for f32 {
    fn tolerance() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn tolerance() -> Self {
        1e-10
    }
}
