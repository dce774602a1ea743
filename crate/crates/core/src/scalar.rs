//! Scalar abstraction over the floating-point type used by all game and
//! dynamics computations.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, NumCast};

/// Floating-point scalar: `f32` or `f64`.
///
/// All core types default to `f64`; the generic parameter exists so the same
/// machinery runs in single precision when memory or throughput matter more
/// than the last digits.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert a constant, panicking only on values unrepresentable in `Self`
    /// (never the case for the literals used in this crate).
    fn cast<T: NumCast>(x: T) -> Self {
        NumCast::from(x).expect("constant representable in scalar type")
    }

    /// Tolerance used when checking that probability vectors sum to one.
    ///
    /// `1e-12` in double precision, loosened to a multiple of machine epsilon
    /// for narrower types.
    fn simplex_tol() -> Self {
        Self::cast(1e-12).max(Self::cast(64.0) * Self::epsilon())
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + NumAssign
        + NumCast
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
