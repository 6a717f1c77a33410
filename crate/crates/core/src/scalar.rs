//! Scalar abstraction shared by the analytic code paths.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point type the geometry, numerics and analytic modules are generic over.
///
/// Constants are written as `f64` literals and converted with [`Real::lit`].
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + Sum + 'static
{
    /// Default absolute tolerance of adaptive quadrature at this precision.
    const QUAD_ABS_TOL: f64;
    /// Default relative tolerance of adaptive quadrature at this precision.
    const QUAD_REL_TOL: f64;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn count(n: u32) -> Self {
        Self::lit(f64::from(n))
    }
}

impl Real for f64 {
    const QUAD_ABS_TOL: f64 = 1e-10;
    const QUAD_REL_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const QUAD_ABS_TOL: f64 = 1e-6;
    const QUAD_REL_TOL: f64 = 1e-4;
}
