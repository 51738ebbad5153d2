use std::fmt;
use std::ops::Mul;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{H3Point, SL2Vector};
use crate::scalar::{canonical_sign, is_finite, Real};
use crate::tolerance::Tolerances;
use crate::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> ExtComplex<T> {
    pub fn finite(self) -> Option<Complex<T>> {
        match self {
            Self::Finite(z) => Some(z),
            Self::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }
}

impl<T> From<Complex<T>> for ExtComplex<T> {
    fn from(z: Complex<T>) -> Self {
        Self::Finite(z)
    }
}

/// Conjugacy type of an element of PSL(2,C).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IsomClass<T> {
    Identity,
    Parabolic,
    /// Rotation angle in `(0, π]`; the angle is only defined up to sign.
    Elliptic { angle: T },
    /// Complex translation length with positive real part.
    Loxodromic { length: Complex<T> },
}

/// Fixed points on the sphere of a non-identity transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPoints<T> {
    One(ExtComplex<T>),
    Two(ExtComplex<T>, ExtComplex<T>),
}

impl<T: Real> FixedPoints<T> {
    pub fn to_vec(self) -> Vec<ExtComplex<T>> {
        match self {
            Self::One(p) => vec![p],
            Self::Two(p, q) => vec![p, q],
        }
    }
}

/// An element of PSL(2,C), stored as a determinant-one matrix
/// `[[a11, a12], [a21, a22]]`.
///
/// The lift is canonicalized so that the first nonzero entry (in reading
/// order) has positive leading component; `M` and `-M` therefore build the
/// same value and every operation is sign-insensitive.
#[derive(Clone, Copy, PartialEq)]
pub struct MobiusTransform<T> {
    a11: Complex<T>,
    a12: Complex<T>,
    a21: Complex<T>,
    a22: Complex<T>,
}

impl<T: Real> fmt::Debug for MobiusTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Mobius[[{}, {}], [{}, {}]]",
            self.a11, self.a12, self.a21, self.a22
        )
    }
}

impl<T: Real> MobiusTransform<T> {
    /// Builds the transform `z ↦ (a11 z + a12) / (a21 z + a22)`, scaling the
    /// entries to determinant one.
    pub fn new(a11: Complex<T>, a12: Complex<T>, a21: Complex<T>, a22: Complex<T>) -> Result<Self> {
        let det = a11 * a22 - a12 * a21;
        let scale = [a11, a12, a21, a22]
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), T::max);
        if !(det.norm() > T::epsilon() * T::lit(16.0) * scale) || !is_finite(det) {
            return Err(Error::Singular(det.norm().to_f64().unwrap_or(f64::NAN)));
        }
        if (det - Complex::one()).norm() <= T::epsilon() * T::lit(4.0) {
            return Ok(Self::raw(a11, a12, a21, a22));
        }
        let k = det.sqrt().inv();
        Ok(Self::raw(a11 * k, a12 * k, a21 * k, a22 * k))
    }

    /// From four entries in reading order.
    pub fn from_entries(e: [Complex<T>; 4]) -> Result<Self> {
        Self::new(e[0], e[1], e[2], e[3])
    }

    // Entries must already have determinant one.
    fn raw(a11: Complex<T>, a12: Complex<T>, a21: Complex<T>, a22: Complex<T>) -> Self {
        let lead = [a11, a12, a21, a22]
            .into_iter()
            .find(|z| !z.is_zero())
            .unwrap_or_else(Complex::one);
        if canonical_sign(lead) == lead {
            Self { a11, a12, a21, a22 }
        } else {
            Self { a11: -a11, a12: -a12, a21: -a21, a22: -a22 }
        }
    }

    pub fn identity() -> Self {
        Self::raw(Complex::one(), Complex::zero(), Complex::zero(), Complex::one())
    }

    /// `z ↦ λ z + μ`.
    pub fn affine(lambda: Complex<T>, mu: Complex<T>) -> Result<Self> {
        Self::new(lambda, mu, Complex::zero(), Complex::one())
    }

    /// `z ↦ e^w (z − c) + c`: the similarity with multiplier `e^w` fixing `c`,
    /// built from `e^{±w/2}` so that no square root branch is involved.
    pub fn similarity_about(w: Complex<T>, center: Complex<T>) -> Self {
        let half = w * T::lit(0.5);
        let lam = half.exp();
        let inv = (-half).exp();
        Self::raw(lam, center * (inv - lam), Complex::zero(), inv)
    }

    pub fn entries(&self) -> [Complex<T>; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn trace(&self) -> Complex<T> {
        self.a11 + self.a22
    }

    /// `tr² − 4`, computed as `(a11 − a22)² + 4 a12 a21` to avoid the
    /// cancellation near parabolics.
    pub fn discriminant(&self) -> Complex<T> {
        let d = self.a11 - self.a22;
        d * d + self.a12 * self.a21 * T::lit(4.0)
    }

    pub fn det(&self) -> Complex<T> {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (self, other);
        Self::raw(
            a.a11 * b.a11 + a.a12 * b.a21,
            a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21,
            a.a21 * b.a12 + a.a22 * b.a22,
        )
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.inverse() } else { *self };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.compose(self).compose(&g.inverse())
    }

    /// Frobenius distance between the classes in PSL(2,C): the smaller of
    /// `‖A − B‖` and `‖A + B‖`.
    pub fn distance(&self, other: &Self) -> T {
        let a = self.entries();
        let b = other.entries();
        let minus: T = (0..4).map(|i| (a[i] - b[i]).norm_sqr()).fold(T::zero(), |s, x| s + x);
        let plus: T = (0..4).map(|i| (a[i] + b[i]).norm_sqr()).fold(T::zero(), |s, x| s + x);
        minus.min(plus).sqrt()
    }

    /// Sign-insensitive entrywise comparison.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let a = self.entries();
        let b = other.entries();
        let within = |sign: T| (0..4).all(|i| (a[i] - b[i] * sign).norm() <= tol);
        within(T::one()) || within(-T::one())
    }

    pub fn is_identity(&self, tol: T) -> bool {
        self.approx_eq(&Self::identity(), tol)
    }

    /// Action on the Riemann sphere.
    pub fn apply_boundary(&self, z: ExtComplex<T>) -> ExtComplex<T> {
        match z {
            ExtComplex::Infinity => {
                if self.a21.is_zero() {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a11 / self.a21)
                }
            }
            ExtComplex::Finite(z) => {
                let den = self.a21 * z + self.a22;
                if den.is_zero() {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a11 * z + self.a12) / den)
                }
            }
        }
    }

    /// Convenience for finite points, `None` at the pole.
    pub fn apply(&self, z: Complex<T>) -> Option<Complex<T>> {
        self.apply_boundary(ExtComplex::Finite(z)).finite()
    }

    /// Poincaré extension to the upper half-space:
    /// `z' = ((a z + b) conj(c z + d) + a conj(c) t²) / D`, `t' = t / D`,
    /// `D = |c z + d|² + |c|² t²`.
    pub fn apply_h3(&self, p: &H3Point<T>) -> H3Point<T> {
        let (z, t) = (p.z(), p.t());
        let den = self.a21 * z + self.a22;
        let t2 = t * t;
        let d = den.norm_sqr() + self.a21.norm_sqr() * t2;
        let zn = ((self.a11 * z + self.a12) * den.conj() + self.a11 * self.a21.conj() * t2) / d;
        H3Point::new_unchecked(zn, t / d)
    }

    pub fn classify(&self, tol: &Tolerances<T>) -> IsomClass<T> {
        if self.is_identity(tol.identity) {
            return IsomClass::Identity;
        }
        if self.discriminant().norm() < tol.parabolic {
            return IsomClass::Parabolic;
        }
        let tr2 = self.trace() * self.trace();
        let real = tr2.im.abs() <= tol.parabolic * T::one().max(tr2.norm());
        if real && tr2.re >= T::zero() && tr2.re < T::lit(4.0) {
            let len = self.length_unchecked();
            return IsomClass::Elliptic { angle: len.im.abs() };
        }
        IsomClass::Loxodromic { length: self.length_unchecked() }
    }

    /// Complex translation length `ℓ` with `tr = ±2 cosh(ℓ/2)`, normalized to
    /// `Re ℓ ≥ 0` and `Im ℓ ∈ (−π, π]` (`Im ℓ ≥ 0` when `Re ℓ = 0`).
    pub fn complex_translation_length(&self, tol: &Tolerances<T>) -> Result<Complex<T>> {
        if self.is_identity(tol.identity) {
            return Err(Error::IdentityInput);
        }
        if self.discriminant().norm() < tol.parabolic {
            return Err(Error::ParabolicInput);
        }
        Ok(self.length_unchecked())
    }

    fn length_unchecked(&self) -> Complex<T> {
        let tr = self.trace();
        let root = self.discriminant().sqrt();
        let half = T::lit(0.5);
        let l1 = (tr + root) * half;
        let l2 = (tr - root) * half;
        let lambda = if l1.norm_sqr() >= l2.norm_sqr() { l1 } else { l2 };
        normalize_length(lambda.ln() * T::lit(2.0))
    }

    /// Fixed points on the sphere: two for loxodromic and elliptic
    /// transforms, one for parabolics.
    pub fn fixed_points(&self, tol: &Tolerances<T>) -> Result<FixedPoints<T>> {
        if self.is_identity(tol.identity) {
            return Err(Error::IdentityInput);
        }
        // a21 z² + (a22 − a11) z − a12 = 0
        let qa = self.a21;
        let qb = self.a22 - self.a11;
        let qc = -self.a12;
        let parabolic = self.discriminant().norm() < tol.parabolic;
        if qa.is_zero() {
            if parabolic || qb.is_zero() {
                return Ok(FixedPoints::One(ExtComplex::Infinity));
            }
            return Ok(FixedPoints::Two(
                ExtComplex::Finite(-qc / qb),
                ExtComplex::Infinity,
            ));
        }
        if parabolic {
            return Ok(FixedPoints::One(ExtComplex::Finite(-qb / (qa * T::lit(2.0)))));
        }
        let root = self.discriminant().sqrt();
        let root = if (qb.conj() * root).re >= T::zero() { root } else { -root };
        let q = (qb + root) * T::lit(-0.5);
        Ok(FixedPoints::Two(
            ExtComplex::Finite(q / qa),
            ExtComplex::Finite(qc / q),
        ))
    }

    /// `Ad(m) v = m v m⁻¹`.
    pub fn adjoint(&self, v: &SL2Vector<T>) -> SL2Vector<T> {
        let [a, b, c, d] = self.entries();
        let [p, q, r, s] = v.matrix();
        // m v
        let (x11, x12, x21, x22) = (a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s);
        // (m v) m⁻¹ with m⁻¹ = [[d, -b], [-c, a]]
        let y11 = x11 * d - x12 * c;
        let y12 = -x11 * b + x12 * a;
        let y21 = x21 * d - x22 * c;
        SL2Vector::new(y11, y12, y21)
    }
}

/// Canonical representative of a complex length modulo `2πi` and sign.
pub(crate) fn normalize_length<T: Real>(l: Complex<T>) -> Complex<T> {
    let mut l = if l.re < T::zero() { -l } else { l };
    let tau = T::TAU();
    let mut im = l.im - (l.im / tau).round() * tau;
    if im <= -T::PI() {
        im = im + tau;
    }
    l.im = im;
    let tiny = T::epsilon() * T::lit(64.0) * (T::one() + l.norm());
    if l.re.abs() <= tiny && l.im < T::zero() {
        l.im = -l.im;
    }
    l
}

impl<T: Real> Mul for MobiusTransform<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<T: Real> Serialize for MobiusTransform<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for MobiusTransform<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = <[Complex<T>; 4]>::deserialize(d)?;
        Self::from_entries(e).map_err(serde::de::Error::custom)
    }
}
