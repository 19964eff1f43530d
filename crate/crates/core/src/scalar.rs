//! Scalar abstraction shared by the numerical modules.
//!
//! Everything that touches floating point is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Complex entries are `Complex<R>`.

use nalgebra::{Complex, DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real field used for matrix entries: `f32` or `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default {
    /// Machine epsilon of the underlying float.
    fn epsilon() -> Self;
}

impl Real for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

/// Complex scalar over `R`.
pub type C<R> = Complex<R>;

/// Dense complex matrix over `R`.
pub type CMat<R> = DMatrix<Complex<R>>;

/// Converts an `f64` literal into `R`.
#[inline]
pub fn lit<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts `R` to `f64` (used for reporting and rounding).
#[inline]
pub fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<R: Real>(re: R, im: R) -> C<R> {
    Complex::new(re, im)
}

/// `exp(i theta)`.
#[inline]
pub fn cis<R: Real>(theta: R) -> C<R> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn real<R: Real>(x: R) -> C<R> {
    Complex::new(x, R::zero())
}
