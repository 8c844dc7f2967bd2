use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating-point scalar accepted by every numerical routine in the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + FftNum
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + FftNum
        + Debug
        + Display
        + LowerExp
        + Sum
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

/// Converts an index or count into the working scalar type.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// True when `x` is one of 0, −1, −2, …
#[inline]
pub fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.round()
}
