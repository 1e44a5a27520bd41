//! Scalar abstraction over the floating-point type used by the library.
//!
//! All core math is generic over [`Real`], which is implemented for `f32`
//! and `f64`. Concrete aliases for the common `f64` instantiation live at
//! the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the bandit math is generic over.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Convert from `f64`; lossless for `f64`, rounds for `f32`.
pub(crate) fn from_f64<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("every f64 is representable in a Real type")
}

/// Convert a count into the scalar domain.
pub(crate) fn from_u64<R: Real>(x: u64) -> R {
    R::from_u64(x).expect("every u64 is representable in a Real type")
}
