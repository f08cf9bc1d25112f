use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type the geometric core is written against.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute slack used for range membership of arc angles.
    fn angle_slack() -> Self;

    /// Scaled tolerance for endpoint residual checks.
    fn residual_tol() -> Self;

    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn angle_slack() -> Self {
        1e-9
    }
    fn residual_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn angle_slack() -> Self {
        1e-4
    }
    fn residual_tol() -> Self {
        1e-3
    }
}
