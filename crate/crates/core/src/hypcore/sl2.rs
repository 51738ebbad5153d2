use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Real;
use crate::{Error, Result};

/// A traceless 2×2 complex matrix `[[h, e], [f, −h]]`, an element of sl(2,C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SL2Vector<T> {
    h: Complex<T>,
    e: Complex<T>,
    f: Complex<T>,
}

impl<T: Real> SL2Vector<T> {
    pub fn new(h: Complex<T>, e: Complex<T>, f: Complex<T>) -> Self {
        Self { h, e, f }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z)
    }

    /// From a general matrix; fails unless `|trace| ≤ tol`. The trace part
    /// within tolerance is projected away.
    pub fn from_matrix(m: [Complex<T>; 4], tol: T) -> Result<Self> {
        let tr = m[0] + m[3];
        if tr.norm() > tol {
            return Err(Error::InvalidArgument(format!("matrix trace {tr} is not zero")));
        }
        Ok(Self::traceless_part(m))
    }

    /// Projection `m − (tr m / 2) I`.
    pub fn traceless_part(m: [Complex<T>; 4]) -> Self {
        let h = (m[0] - m[3]) * T::lit(0.5);
        Self::new(h, m[1], m[2])
    }

    pub fn matrix(&self) -> [Complex<T>; 4] {
        [self.h, self.e, self.f, -self.h]
    }

    /// Coordinates `(h, e, f)` in the standard basis.
    pub fn coords(&self) -> [Complex<T>; 3] {
        [self.h, self.e, self.f]
    }

    pub fn from_coords(c: [Complex<T>; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    /// Frobenius norm of the matrix.
    pub fn norm(&self) -> T {
        (self.h.norm_sqr() * T::lit(2.0) + self.e.norm_sqr() + self.f.norm_sqr()).sqrt()
    }
}

impl<T: Real> Add for SL2Vector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.h + o.h, self.e + o.e, self.f + o.f)
    }
}

impl<T: Real> Sub for SL2Vector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.h - o.h, self.e - o.e, self.f - o.f)
    }
}

impl<T: Real> Neg for SL2Vector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.h, -self.e, -self.f)
    }
}

impl<T: Real> Mul<Complex<T>> for SL2Vector<T> {
    type Output = Self;
    fn mul(self, k: Complex<T>) -> Self {
        Self::new(self.h * k, self.e * k, self.f * k)
    }
}

impl<T: Real> Serialize for SL2Vector<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for SL2Vector<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = <[Complex<T>; 4]>::deserialize(d)?;
        Self::from_matrix(m, T::lit(1e-12)).map_err(serde::de::Error::custom)
    }
}
