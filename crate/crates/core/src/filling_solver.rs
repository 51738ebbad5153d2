//! Inverting the filling-coordinate map: closed form for fixed `b`, Newton
//! iteration along holomorphic one-parameter families, and filling
//! sequences approaching a cusp.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hypcore::MobiusTransform;
use crate::scalar::{two_pi_i, Real};
use crate::torus_end::{EndParameter, FillingCoordinate};
use crate::{Error, Result};

/// Polynomial with complex coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Real")]
pub struct Polynomial<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `w ↦ w`.
    pub fn identity() -> Self {
        Self { coeffs: vec![Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())] }
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, w: Complex<T>) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        self.coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * w + c, dp * w + p))
    }

    pub fn eval(&self, w: Complex<T>) -> Complex<T> {
        self.eval_with_derivative(w).0
    }
}

/// A holomorphic family `w ↦ (a(w), b(w))` over the disc `|w − center| < radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath<T>", bound = "T: Real")]
pub struct HolomorphicPath<T: Real> {
    a_coeffs: Polynomial<T>,
    b_coeffs: Polynomial<T>,
    center: Complex<T>,
    radius: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct RawPath<T: Real> {
    a_coeffs: Vec<Complex<T>>,
    b_coeffs: Vec<Complex<T>>,
    center: Complex<T>,
    radius: T,
}

impl<T: Real> TryFrom<RawPath<T>> for HolomorphicPath<T> {
    type Error = Error;
    fn try_from(r: RawPath<T>) -> Result<Self> {
        Self::new(Polynomial::new(r.a_coeffs)?, Polynomial::new(r.b_coeffs)?, r.center, r.radius)
    }
}

const CHECK_GRID: usize = 24;

impl<T: Real> HolomorphicPath<T> {
    /// Checks `Im b(w) > 0` on a polar grid covering the closed disc.
    pub fn new(a: Polynomial<T>, b: Polynomial<T>, center: Complex<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument("path radius must be positive".into()));
        }
        let path = Self { a_coeffs: a, b_coeffs: b, center, radius };
        for i in 0..=CHECK_GRID {
            let r = radius * T::from_usize(i).unwrap() / T::from_usize(CHECK_GRID).unwrap();
            for j in 0..4 * CHECK_GRID {
                let ang = T::TAU() * T::from_usize(j).unwrap() / T::from_usize(4 * CHECK_GRID).unwrap();
                let w = center + Complex::from_polar(r, ang);
                if !(path.b_coeffs.eval(w).im > T::zero()) {
                    return Err(Error::InvalidArgument(format!("Im b(w) <= 0 at w = {w}")));
                }
            }
        }
        Ok(path)
    }

    pub fn a(&self) -> &Polynomial<T> {
        &self.a_coeffs
    }

    pub fn b(&self) -> &Polynomial<T> {
        &self.b_coeffs
    }

    pub fn center(&self) -> Complex<T> {
        self.center
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn contains(&self, w: Complex<T>) -> bool {
        (w - self.center).norm() <= self.radius
    }

    pub fn end_at(&self, w: Complex<T>) -> Result<EndParameter<T>> {
        EndParameter::new(self.a_coeffs.eval(w), self.b_coeffs.eval(w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport<T> {
    pub w: Complex<T>,
    pub residual: T,
    pub iterations: usize,
    pub converged: bool,
}

/// The end `(2πi / (x + by), b)` with filling coordinates `±(x, y)`.
pub fn solve_direct<T: Real>(b: Complex<T>, x: T, y: T) -> Result<EndParameter<T>> {
    if x == T::zero() && y == T::zero() {
        return Err(Error::ZeroTarget);
    }
    EndParameter::new(two_pi_i::<T>() / (b * y + x), b)
}

/// Newton iteration for `F(w) = a(w)(x + b(w) y) − 2πi` along `path`,
/// starting from `w0`.
pub fn solve_on_path<T: Real>(
    path: &HolomorphicPath<T>,
    x: T,
    y: T,
    w0: Complex<T>,
    tol: T,
    max_iter: usize,
) -> Result<SolveReport<T>> {
    if x == T::zero() && y == T::zero() {
        return Err(Error::ZeroTarget);
    }
    if !path.contains(w0) {
        return Err(Error::InvalidArgument(format!("start {w0} is outside the path domain")));
    }
    let target = two_pi_i::<T>();
    let residual_at = |w: Complex<T>| {
        let (a, da) = path.a_coeffs.eval_with_derivative(w);
        let (b, db) = path.b_coeffs.eval_with_derivative(w);
        let lin = b * y + x;
        (a * lin - target, da * lin + a * db * y)
    };
    let mut w = w0;
    let (mut f, mut df) = residual_at(w);
    let mut iterations = 0;
    while iterations < max_iter {
        if f.norm() <= tol {
            break;
        }
        if df.norm() == T::zero() || !df.re.is_finite() || !df.im.is_finite() {
            break;
        }
        w = w - f / df;
        iterations += 1;
        if !path.contains(w) || !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::DomainExit(format!("{w}")));
        }
        (f, df) = residual_at(w);
    }
    let residual = f.norm();
    Ok(SolveReport { w, residual, iterations, converged: residual <= tol })
}

/// A basis `{(p, q), (r, s)}` of `Z²` with `ps − qr = 1`. The first vector
/// is the class filled at coordinates `(1, 0)` in this basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnimodularBasis {
    pub first: (i64, i64),
    pub second: (i64, i64),
}

impl UnimodularBasis {
    pub fn new(first: (i64, i64), second: (i64, i64)) -> Result<Self> {
        let det = first.0 as i128 * second.1 as i128 - first.1 as i128 * second.0 as i128;
        if det != 1 {
            return Err(Error::InvalidArgument(format!("basis determinant is {det}, expected 1")));
        }
        Ok(Self { first, second })
    }

    /// Completes a primitive class `(p, q)` to a basis using the extended
    /// Euclidean algorithm.
    pub fn completing(p: i64, q: i64) -> Result<Self> {
        let (g, u, v) = ext_gcd(p, q);
        if g != 1 {
            return Err(Error::InvalidArgument(format!("({p}, {q}) is not primitive")));
        }
        // p u + q v = 1, so (r, s) = (−v, u) gives ps − qr = 1
        Self::new((p, q), (-v, u))
    }

    /// Standard coordinates of `i·first + j·second`.
    pub fn combine(&self, i: i64, j: i64) -> (i64, i64) {
        (i * self.first.0 + j * self.second.0, i * self.first.1 + j * self.second.1)
    }
}

impl Default for UnimodularBasis {
    fn default() -> Self {
        Self { first: (1, 0), second: (0, 1) }
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// One entry of a filling sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SequenceTerm<T: Real> {
    pub n: i64,
    /// Standard coordinates `(p, q)` of the filled class.
    pub coordinates: (i64, i64),
    pub end: EndParameter<T>,
}

/// Ends filled at coordinates `(1, n)` in the basis completing `(p, q)`:
/// the class `(p, q) + n·(r, s)` in standard coordinates.
pub fn filling_sequence<T: Real>(b: Complex<T>, p: i64, q: i64, n_list: &[i64]) -> Result<Vec<SequenceTerm<T>>> {
    filling_sequence_in_basis(b, &UnimodularBasis::completing(p, q)?, n_list)
}

pub fn filling_sequence_in_basis<T: Real>(
    b: Complex<T>,
    basis: &UnimodularBasis,
    n_list: &[i64],
) -> Result<Vec<SequenceTerm<T>>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty n list".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let (x, y) = basis.combine(1, n);
            let end = solve_direct(b, T::from_i64(x).unwrap(), T::from_i64(y).unwrap())?;
            Ok(SequenceTerm { n, coordinates: (x, y), end })
        })
        .collect()
}

/// Largest PSL(2,C) Frobenius distance between the generator holonomies
/// of `s` and those of the cusp `(0, b)`.
pub fn cusp_distance<T: Real>(s: &EndParameter<T>, cusp_b: Complex<T>) -> Result<T> {
    let cusp = EndParameter::cusp(cusp_b)?;
    let ours = s.generator_holonomies();
    let theirs = cusp.generator_holonomies();
    Ok(ours
        .iter()
        .zip(&theirs)
        .map(|(m, n): (&MobiusTransform<T>, _)| m.distance(n))
        .fold(T::zero(), T::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport<T> {
    pub samples: usize,
    /// Largest coordinate distance from a sample to its nearest neighbour
    /// in the parameter disc.
    pub max_jump: T,
    /// Number of sample pairs with distinct parameters and equal
    /// coordinates (within 1e-9).
    pub injectivity_violations: usize,
    /// Up to sixteen violating pairs, as sample indices.
    pub example_pairs: Vec<(usize, usize)>,
    pub parameters: Vec<Complex<T>>,
    pub coordinates: Vec<FillingCoordinate<T>>,
}

/// Samples the path's disc and reports how the filling coordinates behave.
/// The report is evidence only; sampling cannot certify injectivity.
pub fn verify_coordinate_continuity<T: Real>(
    path: &HolomorphicPath<T>,
    sample_count: usize,
    seed: u64,
) -> Result<ContinuityReport<T>> {
    if sample_count < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parameters = Vec::with_capacity(sample_count);
    let mut coordinates = Vec::with_capacity(sample_count);
    for _ in 0..sample_count {
        let r = path.radius * rng.gen_range(T::zero()..=T::one()).sqrt();
        let ang = rng.gen_range(T::zero()..T::TAU());
        let w = path.center + Complex::from_polar(r, ang);
        coordinates.push(path.end_at(w)?.filling_coordinates());
        parameters.push(w);
    }
    let same = T::lit(1e-9);
    let mut max_jump = T::zero();
    let mut violations = 0;
    let mut example_pairs = Vec::new();
    for i in 0..sample_count {
        let mut nearest = (T::infinity(), 0);
        for j in 0..sample_count {
            if i == j {
                continue;
            }
            let d = (parameters[i] - parameters[j]).norm();
            if d < nearest.0 {
                nearest = (d, j);
            }
            if j > i && d > same && coordinates[i].distance(&coordinates[j]) <= same {
                violations += 1;
                if example_pairs.len() < 16 {
                    example_pairs.push((i, j));
                }
            }
        }
        max_jump = max_jump.max(coordinates[i].distance(&coordinates[nearest.1]));
    }
    Ok(ContinuityReport {
        samples: sample_count,
        max_jump,
        injectivity_violations: violations,
        example_pairs,
        parameters,
        coordinates,
    })
}
