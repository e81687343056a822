use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssignOps};

/// Floating-point scalar the whole crate is generic over.
///
/// Implemented for `f32` and `f64` through the blanket impl; the crate-root
/// aliases pin the two concrete instantiations.
pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
    /// Default absolute zero-test threshold used when a caller does not
    /// supply one.
    fn default_tol() -> Self {
        Self::from_f64(1e-12).unwrap_or_else(Self::epsilon)
    }

    /// Shorthand for lossy conversion from `f64` constants.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant must convert")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
}
