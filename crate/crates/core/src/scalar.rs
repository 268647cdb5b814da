//! Scalar abstractions.
//!
//! Floating-point code is written against [`Real`] (implemented for `f32`
//! and `f64`). Formulas that must hold exactly, such as the dyadic exponent
//! bookkeeping and the zero-frequency quintic coefficients, are written
//! against [`Exact`], which additionally covers `Ratio<i64>`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, Num};
use rustfft::FftNum;

/// Floating-point scalar usable by every numerical routine in the crate.
pub trait Real:
    Float + FloatConst + FftNum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("literal out of range")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("integer out of range")
    }

    #[inline]
    fn of_i32(n: i32) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("integer out of range")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// `2^k` for integer `k`.
    #[inline]
    fn pow2(k: i32) -> Self {
        Self::lit(2.0).powi(k)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field-like scalar with exact rational literals.
pub trait Exact: Num + Copy + PartialOrd + Neg<Output = Self> + Debug {
    fn ratio(num: i64, den: i64) -> Self;

    fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }
}

impl Exact for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Exact for f32 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }
}

impl Exact for Ratio<i64> {
    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
}
