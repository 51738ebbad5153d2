//! Cone structures `E_s` on a torus end `T × [0, ∞)`, parameterized by
//! `s = (a, b) ∈ C × U`.
//!
//! The universal cover is charted as `R² × [1, ∞)` with the deck group
//! generated by `γ₁: x ↦ x + 1` and `γ₂: y ↦ y + 1`. For `a ≠ 0` the holonomy
//! is the pair of similarities `z ↦ e^a (z − z₀) + z₀` and
//! `z ↦ e^{ab} (z − z₀) + z₀` with `z₀ = 1 / (1 − e^a)`; for `a = 0` it is the
//! parabolic pair `z ↦ z + 1`, `z ↦ z + b`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hypcore::{hyp_distance, H3Point, MobiusTransform};
use crate::scalar::{canonical_sign, dist_mod_sign, two_pi_i, Real};
use crate::{Error, Result};

/// The pair `s = (a, b)` with `Im b > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEndParameter<T>", bound = "T: Real")]
pub struct EndParameter<T: Real> {
    a: Complex<T>,
    b: Complex<T>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct RawEndParameter<T: Real> {
    a: Complex<T>,
    b: Complex<T>,
}

impl<T: Real> TryFrom<RawEndParameter<T>> for EndParameter<T> {
    type Error = Error;
    fn try_from(r: RawEndParameter<T>) -> Result<Self> {
        Self::new(r.a, r.b)
    }
}

/// How the developing map places the height coordinate `t` for `a ≠ 0`.
///
/// Every variant maps `(x, y, t)` to a point at Euclidean distance
/// `|φ_s(x, y)|` from `(z₀, 0)`; they differ in the angle that point makes
/// with the vertical axis over `z₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartVariant {
    /// `(|φ| / √(t² + |φ|²)) (φ, t) + (z₀, 0)`. The angle depends on `|φ|`,
    /// so the chart is not equivariant when `|e^a| ≠ 1` or `|e^{ab}| ≠ 1`.
    Pointwise,
    /// `(z₀, 0) + (φ, t |φ|) / √(1 + t²)`. Equivariant, but the tube radius
    /// does not grow as `a → 0`, so it does not converge to the cusp chart.
    UnitScale,
    /// `(z₀, 0) + (C φ, t |φ|) / √(t² + C²)` with `C = 1 / |2 sinh(a/2)|`.
    /// Equivariant, invariant under `a ↦ −a`, agrees with `Pointwise` where
    /// `Re(a(x + by)) = Re(a)/2`, and converges to the cusp chart as `a → 0`.
    #[default]
    SymmetricScale,
}

impl ChartVariant {
    /// Chart height `t` whose level set develops onto the tube of radius
    /// `eps` around the holonomy axis, for variants where that set is a
    /// level set.
    pub fn tube_height<T: Real>(self, s: &EndParameter<T>, eps: T) -> Result<Option<T>> {
        if s.is_cusp() {
            return Err(Error::ZeroA);
        }
        Ok(match self {
            Self::Pointwise => None,
            Self::UnitScale => Some(eps.sinh().recip()),
            Self::SymmetricScale => Some(s.symmetric_scale() / eps.sinh()),
        })
    }
}

/// Hyperbolic Dehn filling coordinates, a point of `(R² / ±1) ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FillingCoordinate<T> {
    Infinity,
    /// Canonical representative: `x > 0`, or `x = 0` and `y > 0`.
    Finite { x: T, y: T },
}

impl<T: Real> FillingCoordinate<T> {
    /// Canonicalized finite coordinate; `None` for `(0, 0)`.
    pub fn finite(x: T, y: T) -> Option<Self> {
        if x == T::zero() && y == T::zero() {
            return None;
        }
        let (x, y) = if x < T::zero() || (x == T::zero() && y < T::zero()) {
            (-x, -y)
        } else {
            (x, y)
        };
        Some(Self::Finite { x, y })
    }

    pub fn as_pair(&self) -> Option<(T, T)> {
        match *self {
            Self::Finite { x, y } => Some((x, y)),
            Self::Infinity => None,
        }
    }

    /// Distance in `R² / ±1`, infinite against `∞` (zero between two `∞`).
    pub fn distance(&self, other: &Self) -> T {
        match (self.as_pair(), other.as_pair()) {
            (None, None) => T::zero(),
            (Some((x, y)), Some((u, v))) => {
                let minus = (x - u).hypot(y - v);
                let plus = (x + u).hypot(y + v);
                minus.min(plus)
            }
            _ => T::infinity(),
        }
    }
}

/// Topology of the metric completion of `E_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CompletionClass<T> {
    Cusp,
    /// Cone angle `2π`: the metric extends smoothly over the core curve.
    SmoothFilling { p: i64, q: i64 },
    RationalCone { p: i64, q: i64, theta: T },
    Irrational,
    Undetermined,
}

/// A box `[x₀, x₁] × [y₀, y₁] × [t₀, t₁]` of the chart `R² × [1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndRegion<T> {
    pub x: (T, T),
    pub y: (T, T),
    pub t: (T, T),
}

impl<T: Real> EndRegion<T> {
    pub fn new(x: (T, T), y: (T, T), t: (T, T)) -> Result<Self> {
        if !(t.0 >= T::one()) {
            return Err(Error::InvalidArgument("region must satisfy t0 >= 1".into()));
        }
        let r = Self { x, y, t };
        if !(x.1 > x.0 && y.1 > y.0 && t.1 > t.0) {
            return Err(Error::DegenerateRegion);
        }
        Ok(r)
    }

    fn sample(&self, rng: &mut impl Rng) -> (T, T, T) {
        (
            rng.gen_range(self.x.0..=self.x.1),
            rng.gen_range(self.y.0..=self.y.1),
            rng.gen_range(self.t.0..=self.t.1),
        )
    }
}

impl<T: Real> EndParameter<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        if !(b.im > T::zero()) {
            return Err(Error::ModulusNotInUpperHalfPlane(
                b.im.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { a, b })
    }

    /// The cusp `(0, b)`.
    pub fn cusp(b: Complex<T>) -> Result<Self> {
        Self::new(Complex::new(T::zero(), T::zero()), b)
    }

    pub fn a(&self) -> Complex<T> {
        self.a
    }

    pub fn b(&self) -> Complex<T> {
        self.b
    }

    pub fn is_cusp(&self) -> bool {
        self.a.re == T::zero() && self.a.im == T::zero()
    }

    /// The same end with `a` replaced by its canonical sign representative.
    pub fn canonical(&self) -> Self {
        Self { a: canonical_sign(self.a), b: self.b }
    }

    /// True when `e^a = 1` but `a != 0`, i.e. `a` in `2πiℤ∖{0}`. There the
    /// meridian acts trivially and `z₀` has no finite value.
    pub fn on_singular_locus(&self) -> bool {
        let gap = (Complex::new(T::one(), T::zero()) - self.a.exp()).norm();
        !self.is_cusp() && self.a.norm() > T::one() && gap <= T::epsilon().sqrt() * T::lit(1e-2)
    }

    /// `z₀ = 1 / (1 − e^a)`, the finite fixed point of the holonomy.
    pub fn z0(&self) -> Result<Complex<T>> {
        if self.is_cusp() {
            return Err(Error::ZeroA);
        }
        if self.on_singular_locus() {
            return Err(Error::SingularNormalization);
        }
        Ok((Complex::new(T::one(), T::zero()) - self.a.exp()).inv())
    }

    fn symmetric_scale(&self) -> T {
        (self.a * T::lit(0.5)).sinh().norm().recip() * T::lit(0.5)
    }

    /// `φ_s(x, y) = −z₀ e^{xa + yab}`.
    pub fn phi(&self, x: T, y: T) -> Result<Complex<T>> {
        let z0 = self.z0()?;
        Ok(-z0 * (self.a * (self.b * y + x)).exp())
    }

    /// The developing map `D_s(x, y, t)` into the upper half-space.
    pub fn develop(&self, x: T, y: T, t: T, variant: ChartVariant) -> Result<H3Point<T>> {
        if !(t > T::zero()) {
            return Err(Error::NonPositiveHeight(t.to_f64().unwrap_or(f64::NAN)));
        }
        if self.is_cusp() {
            return H3Point::new(self.b * y + x, t);
        }
        let z0 = self.z0()?;
        let phi = self.phi(x, y)?;
        let r = phi.norm();
        let (z, h) = match variant {
            ChartVariant::Pointwise => {
                let k = r / t.hypot(r);
                (z0 + phi * k, t * k)
            }
            ChartVariant::UnitScale => {
                let k = t.hypot(T::one()).recip();
                (z0 + phi * k, t * r * k)
            }
            ChartVariant::SymmetricScale => {
                let c = self.symmetric_scale();
                let k = t.hypot(c).recip();
                (z0 + phi * (c * k), t * r * k)
            }
        };
        H3Point::new(z, h)
    }

    /// `ρ_s(γ₁^m γ₂^n)`.
    pub fn holonomy(&self, m: i64, n: i64) -> MobiusTransform<T> {
        let w = self.b * T::from_i64(n).unwrap() + T::from_i64(m).unwrap();
        if self.is_cusp() {
            return MobiusTransform::affine(Complex::new(T::one(), T::zero()), w)
                .expect("translations are invertible");
        }
        // On e^a = 1 use the conjugate frame with fixed points 0 and ∞.
        let z0 = self.z0().unwrap_or_else(|_| Complex::new(T::zero(), T::zero()));
        MobiusTransform::similarity_about(self.a * w, z0)
    }

    /// `[ρ_s(γ₁), ρ_s(γ₂)]`.
    pub fn generator_holonomies(&self) -> [MobiusTransform<T>; 2] {
        [self.holonomy(1, 0), self.holonomy(0, 1)]
    }

    /// Lifted complex length `a(x + by)` in canonical sign, not reduced
    /// modulo `2πi`.
    pub fn complex_length(&self, x: T, y: T) -> Complex<T> {
        canonical_sign(self.a * (self.b * y + x))
    }

    /// The unique `±(x, y)` with `a(x + by) = ±2πi`, or `∞` for a cusp.
    pub fn filling_coordinates(&self) -> FillingCoordinate<T> {
        if self.is_cusp() {
            return FillingCoordinate::Infinity;
        }
        let w = two_pi_i::<T>() / self.a;
        let y = w.im / self.b.im;
        let x = w.re - self.b.re * y;
        FillingCoordinate::finite(x, y).expect("x + by = 2πi/a is nonzero")
    }

    /// Classifies the metric completion.
    ///
    /// A direction `(p, q)` is accepted when the meridian length
    /// `a(p + bq)` has real part within `tol` of zero; candidates are the
    /// continued-fraction convergents of the coordinate slope with
    /// denominators up to `max_denominator`. The cone angle is the meridian
    /// rotation `|Im a(p + bq)|`.
    pub fn classify_completion(&self, tol: T, max_denominator: u64) -> CompletionClass<T> {
        let Some((x, y)) = self.filling_coordinates().as_pair() else {
            return CompletionClass::Cusp;
        };
        let swap = x.abs() < y.abs();
        let (big, small) = if swap { (y, x) } else { (x, y) };
        let ratio = small / big;
        if !ratio.is_finite() {
            return CompletionClass::Undetermined;
        }
        let mut reached_bound = false;
        for (num, den) in Convergents::new(ratio, max_denominator, &mut reached_bound) {
            // slope small/big ≈ num/den, so (big, small) ∝ (den, num)
            let (mut p, mut q) = if swap { (num, den) } else { (den, num) };
            if T::from_i64(p).unwrap() * x + T::from_i64(q).unwrap() * y < T::zero() {
                p = -p;
                q = -q;
            }
            let len = self.a * (self.b * T::from_i64(q).unwrap() + T::from_i64(p).unwrap());
            if len.re.abs() <= tol {
                let theta = len.im.abs();
                if (theta - T::TAU()).abs() <= tol * T::TAU() {
                    return CompletionClass::SmoothFilling { p, q };
                }
                return CompletionClass::RationalCone { p, q, theta };
            }
        }
        if reached_bound {
            CompletionClass::Irrational
        } else {
            CompletionClass::Undetermined
        }
    }

    /// Length of the geodesic `(x, y)`-curve on the torus at distance `eps`
    /// from the holonomy axis: `√((Re ℓ cosh ε)² + (Im ℓ sinh ε)²)` with
    /// `ℓ = a(x + by)`.
    pub fn cross_section_length(&self, x: T, y: T, eps: T) -> Result<T> {
        if self.is_cusp() {
            return Err(Error::ZeroA);
        }
        if !(eps > T::zero()) {
            return Err(Error::InvalidArgument("tube radius must be positive".into()));
        }
        let l = self.a * (self.b * y + x);
        Ok((l.re * eps.cosh()).hypot(l.im * eps.sinh()))
    }

    /// Whether the two ends are isometric: `b = b'` and `a' = ±a`.
    pub fn end_isometric(&self, other: &Self, tol: T) -> bool {
        (self.b - other.b).norm() <= tol && dist_mod_sign(self.a, other.a) <= tol
    }
}

/// Continued-fraction convergents `(h, k)` of a real number, stopping once
/// `k` would exceed the bound (recorded in `reached`) or the expansion
/// terminates.
struct Convergents<'a, T> {
    rem: T,
    h: (i64, i64),
    k: (i64, i64),
    max_den: u64,
    reached: &'a mut bool,
    done: bool,
}

impl<'a, T: Real> Convergents<'a, T> {
    fn new(x: T, max_den: u64, reached: &'a mut bool) -> Self {
        Self { rem: x, h: (1, 0), k: (0, 1), max_den, reached, done: false }
    }
}

impl<T: Real> Iterator for Convergents<'_, T> {
    type Item = (i64, i64);

    fn next(&mut self) -> Option<(i64, i64)> {
        if self.done {
            return None;
        }
        let a = self.rem.floor();
        let limit = T::from_u64(self.max_den).unwrap();
        if !a.is_finite() || a.abs() > limit * T::lit(4.0) + T::one() {
            *self.reached = true;
            self.done = true;
            return None;
        }
        let ai = a.to_i64().unwrap();
        let h = ai.checked_mul(self.h.0).and_then(|v| v.checked_add(self.h.1));
        let k = ai.checked_mul(self.k.0).and_then(|v| v.checked_add(self.k.1));
        let (Some(h), Some(k)) = (h, k) else {
            *self.reached = true;
            self.done = true;
            return None;
        };
        if k.unsigned_abs() > self.max_den {
            *self.reached = true;
            self.done = true;
            return None;
        }
        self.h = (h, self.h.0);
        self.k = (k, self.k.0);
        let frac = self.rem - a;
        if frac <= T::epsilon() * T::lit(4.0) {
            self.done = true;
        } else {
            self.rem = frac.recip();
        }
        Some((h, k))
    }
}

/// Sampled biLipschitz constant between the developed charts of two ends.
///
/// Draws `samples` pairs of chart points uniformly from `region` (seeded,
/// so the estimate is deterministic) and returns the largest of
/// `d₂/d₁` and `d₁/d₂`, where `dᵢ` is the hyperbolic distance between the
/// developed images under `D_{sᵢ}`.
pub fn estimate_bilipschitz<T: Real>(
    s1: &EndParameter<T>,
    s2: &EndParameter<T>,
    region: &EndRegion<T>,
    samples: usize,
    seed: u64,
    variant: ChartVariant,
) -> Result<T> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if !(region.x.1 > region.x.0 && region.y.1 > region.y.0 && region.t.1 > region.t.0) {
        return Err(Error::DegenerateRegion);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::one();
    for _ in 0..samples {
        let (px, py, pt) = region.sample(&mut rng);
        let (qx, qy, qt) = region.sample(&mut rng);
        let d1 = hyp_distance(&s1.develop(px, py, pt, variant)?, &s1.develop(qx, qy, qt, variant)?);
        let d2 = hyp_distance(&s2.develop(px, py, pt, variant)?, &s2.develop(qx, qy, qt, variant)?);
        if d1 > T::zero() && d2 > T::zero() {
            let r = d2 / d1;
            worst = worst.max(r).max(r.recip());
        }
    }
    Ok(worst)
}
