use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the LP machinery is generic over.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Pivot and feasibility tolerance.
    fn tolerance() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f64 {
    fn tolerance() -> f64 {
        1e-9
    }
}

impl Scalar for f32 {
    fn tolerance() -> f32 {
        1e-5
    }
}
