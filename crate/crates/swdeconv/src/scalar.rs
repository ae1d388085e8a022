//! Scalar abstraction: every module is generic over `Scalar`, implemented
//! for `f32` and `f64`.
//!
//! The numeric accuracy contracts documented on individual operations are
//! stated for `f64`; the `f32` instantiation trades precision for footprint.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftNum;
use std::fmt::{Debug, Display, LowerExp};

/// Floating-point element type for signals, spectra, and statistics.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + FftNum + Display + LowerExp + Debug
{
    /// Draws one standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draws one uniform variate from [0, 1).
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        StandardNormal.sample(rng)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        rng.gen()
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f32 {
        StandardNormal.sample(rng)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> f32 {
        rng.gen()
    }
}

/// Converts an f64 constant to the working scalar. Exact for f64.
pub(crate) fn c<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant must be representable")
}

/// Reports a scalar as f64 for diagnostics. Never fails for f32/f64.
pub(crate) fn as_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
