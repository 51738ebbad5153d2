//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use rand::distributions::uniform::SampleUniform;
use serde::{de::DeserializeOwned, Serialize};

/// Real scalar the geometry is computed over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + SampleUniform
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn two_pi_i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::TAU())
}

/// Canonical representative of `z` in `C / {±1}`: the first nonzero of
/// `(re, im)` is positive.
pub fn canonical_sign<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re < T::zero() || (z.re == T::zero() && z.im < T::zero()) {
        -z
    } else {
        z
    }
}

/// Distance between the classes of `u` and `v` in `C / {±1}`.
pub fn dist_mod_sign<T: Real>(u: Complex<T>, v: Complex<T>) -> T {
    (u - v).norm().min((u + v).norm())
}

/// Distance between `u` and `v` in `C / (2πi Z, ±1)`.
pub fn dist_mod_2pi_i_sign<T: Real>(u: Complex<T>, v: Complex<T>) -> T {
    let wrap = |w: Complex<T>| {
        let k = (w.im / T::TAU()).round();
        Complex::new(w.re, w.im - k * T::TAU()).norm()
    };
    wrap(u - v).min(wrap(u + v))
}
