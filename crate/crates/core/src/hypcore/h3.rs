use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{is_finite, Real};
use crate::{Error, Result};

/// A point `(z, t)` of the upper half-space model `C × R⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H3Point<T> {
    z: Complex<T>,
    t: T,
}

impl<T: Real> H3Point<T> {
    pub fn new(z: Complex<T>, t: T) -> Result<Self> {
        if !(t > T::zero()) || !t.is_finite() || !is_finite(z) {
            return Err(Error::NonPositiveHeight(t.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { z, t })
    }

    pub(crate) fn new_unchecked(z: Complex<T>, t: T) -> Self {
        debug_assert!(t > T::zero());
        Self { z, t }
    }

    pub fn z(&self) -> Complex<T> {
        self.z
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Coordinates `[Re z, Im z, t]`.
    pub fn coords(&self) -> [T; 3] {
        [self.z.re, self.z.im, self.t]
    }

    pub fn distance(&self, other: &Self) -> T {
        hyp_distance(self, other)
    }
}

/// Hyperbolic distance, `cosh d = 1 + (|Δz|² + Δt²) / (2 t t')`, evaluated
/// through `sinh(d/2)` so that nearby points keep full relative precision.
pub fn hyp_distance<T: Real>(p: &H3Point<T>, q: &H3Point<T>) -> T {
    let dt = p.t - q.t;
    let chord = ((p.z - q.z).norm_sqr() + dt * dt).sqrt();
    let half = chord / (T::lit(2.0) * (p.t * q.t).sqrt());
    T::lit(2.0) * half.asinh()
}

impl<T: Real> Serialize for H3Point<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for H3Point<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, t] = <[T; 3]>::deserialize(d)?;
        Self::new(Complex::new(x, y), t).map_err(serde::de::Error::custom)
    }
}
