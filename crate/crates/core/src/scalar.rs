//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All core math is written against [`Real`], implemented for `f32` and `f64`.
//! Reports and serialized artifacts are always emitted in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable by the circle engine and the Wiener simulator.
///
/// `FftNum` brings in `num_traits::Signed`, whose `abs`/`signum` clash with the
/// `Float` methods of the same name; call `Float::abs(x)` in generic code.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Default + Display + Debug + Sum + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index into this scalar.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the scalar.
    #[inline]
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cx_to_f64<T: Real>(z: Cx<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

#[inline]
pub(crate) fn cx_from_f64<T: Real>(z: Complex<f64>) -> Cx<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}
