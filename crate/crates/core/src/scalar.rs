use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the model is evaluated in.
///
/// Implemented for `f32` and `f64`. Tolerances and defaults are written as
/// `f64` literals and converted through [`Real::lit`].
pub trait Real: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl Real for f32 {}
impl Real for f64 {}
