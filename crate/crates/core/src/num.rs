//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point scalar (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Converts an `f64` constant into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// `10·log10(x)`; zero maps to negative infinity.
#[inline]
pub fn to_db<T: Real>(linear: T) -> T {
    lit::<T>(10.0) * linear.log10()
}

#[inline]
pub fn from_db<T: Real>(db: T) -> T {
    lit::<T>(10.0).powf(db / lit(10.0))
}

/// dBm to milliwatts.
#[inline]
pub fn dbm_to_mw<T: Real>(dbm: T) -> T {
    from_db(dbm)
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_phase<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let r = theta % two_pi;
    let r = if r < T::zero() { r + two_pi } else { r };
    // values within rounding of 2π fold back to 0
    if (two_pi - r).abs() <= lit::<T>(64.0) * T::epsilon() * two_pi {
        T::zero()
    } else {
        r
    }
}
