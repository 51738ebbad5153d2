//! Group cohomology with coefficients in `Ad ρ` for finitely presented
//! groups: cocycles, coboundaries, `H¹` dimensions, tangent cocycles of
//! representation paths and strain of vector fields on `C`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::hypcore::{MobiusTransform, SL2Vector};
use crate::linalg::CMat;
use crate::scalar::Real;
use crate::torus_end::EndParameter;
use crate::{Error, Result};

/// A word in the generators: letter `k` is generator `k` (1-based) and
/// `−k` its inverse.
pub type Word = Vec<i32>;

const RELATOR_TOL: f64 = 1e-9;

/// Generator images in PSL(2,C) together with the relators they satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRep<T>", bound = "T: Real")]
pub struct MarkedRepresentation<T: Real> {
    generators: Vec<MobiusTransform<T>>,
    relators: Vec<Word>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct RawRep<T: Real> {
    generators: Vec<MobiusTransform<T>>,
    #[serde(default)]
    relators: Vec<Word>,
}

impl<T: Real> TryFrom<RawRep<T>> for MarkedRepresentation<T> {
    type Error = Error;
    fn try_from(r: RawRep<T>) -> Result<Self> {
        Self::new(r.generators, r.relators)
    }
}

fn check_letter(letter: i32, generators: usize) -> Result<usize> {
    let k = letter.unsigned_abs() as usize;
    if letter == 0 || k > generators {
        return Err(Error::BadWord { letter, generators });
    }
    Ok(k - 1)
}

impl<T: Real> MarkedRepresentation<T> {
    /// Every relator must evaluate to `±I` within 1e-9.
    pub fn new(generators: Vec<MobiusTransform<T>>, relators: Vec<Word>) -> Result<Self> {
        let rep = Self { generators, relators };
        for r in &rep.relators {
            let m = rep.evaluate(r)?;
            if !m.is_identity(T::lit(RELATOR_TOL)) {
                return Err(Error::InvalidArgument(format!("relator {r:?} evaluates to {:?}", m.entries())));
            }
        }
        Ok(rep)
    }

    /// Free group on the given generators.
    pub fn free(generators: Vec<MobiusTransform<T>>) -> Self {
        Self { generators, relators: Vec::new() }
    }

    /// The peripheral `Z²` with generator images `ρ_s(γ₁), ρ_s(γ₂)` and the
    /// commutator relator.
    pub fn torus(end: &EndParameter<T>) -> Self {
        Self { generators: end.generator_holonomies().to_vec(), relators: vec![vec![1, 2, -1, -2]] }
    }

    pub fn generators(&self) -> &[MobiusTransform<T>] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn evaluate(&self, word: &[i32]) -> Result<MobiusTransform<T>> {
        word.iter().try_fold(MobiusTransform::identity(), |acc, &l| {
            let g = self.generators[check_letter(l, self.rank())?];
            Ok(acc.compose(&if l > 0 { g } else { g.inverse() }))
        })
    }

    /// Conjugate representation `g ρ g⁻¹`.
    pub fn conjugate(&self, g: &MobiusTransform<T>) -> Self {
        Self {
            generators: self.generators.iter().map(|m| g.compose(m).compose(&g.inverse())).collect(),
            relators: self.relators.clone(),
        }
    }
}

/// Values of a 1-cochain on the generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Real")]
pub struct Cocycle<T: Real> {
    pub values: Vec<SL2Vector<T>>,
}

impl<T: Real> Cocycle<T> {
    pub fn new(values: Vec<SL2Vector<T>>) -> Self {
        Self { values }
    }

    pub fn zero(generators: usize) -> Self {
        Self { values: vec![SL2Vector::zero(); generators] }
    }

    /// The coboundary `γ ↦ v − Ad ρ(γ) v`.
    pub fn coboundary(rep: &MarkedRepresentation<T>, v: &SL2Vector<T>) -> Self {
        Self { values: rep.generators.iter().map(|g| *v - g.adjoint(v)).collect() }
    }

    fn flatten(&self) -> Vec<Complex<T>> {
        self.values.iter().flat_map(|v| v.coords()).collect()
    }

    /// `sqrt(Σ ‖z(γᵢ)‖²)` with the Frobenius norm on sl(2,C).
    pub fn norm(&self) -> T {
        self.values.iter().fold(T::zero(), |s, v| s + v.norm() * v.norm()).sqrt()
    }
}

impl<T: Real> std::ops::Sub for &Cocycle<T> {
    type Output = Cocycle<T>;
    fn sub(self, rhs: Self) -> Cocycle<T> {
        Cocycle { values: self.values.iter().zip(&rhs.values).map(|(a, b)| *a - *b).collect() }
    }
}

fn check_shape<T: Real>(rep: &MarkedRepresentation<T>, c: &Cocycle<T>) -> Result<()> {
    if c.values.len() != rep.rank() {
        return Err(Error::InvalidArgument(format!(
            "cochain has {} values for {} generators",
            c.values.len(),
            rep.rank()
        )));
    }
    Ok(())
}

/// Extends `c` over `word` by `z(γ₁γ₂) = z(γ₁) + Ad ρ(γ₁) z(γ₂)` and
/// `z(γ⁻¹) = −Ad ρ(γ)⁻¹ z(γ)`.
pub fn extend_cocycle<T: Real>(rep: &MarkedRepresentation<T>, c: &Cocycle<T>, word: &[i32]) -> Result<SL2Vector<T>> {
    check_shape(rep, c)?;
    let mut prefix = MobiusTransform::identity();
    let mut acc = SL2Vector::zero();
    for &l in word {
        let k = check_letter(l, rep.rank())?;
        let g = rep.generators[k];
        let (letter_value, letter_matrix) = if l > 0 {
            (c.values[k], g)
        } else {
            let inv = g.inverse();
            (-inv.adjoint(&c.values[k]), inv)
        };
        acc = acc + prefix.adjoint(&letter_value);
        prefix = prefix.compose(&letter_matrix);
    }
    Ok(acc)
}

/// Largest relator residual and whether it is within `tol`.
pub fn is_cocycle<T: Real>(rep: &MarkedRepresentation<T>, c: &Cocycle<T>, tol: T) -> Result<(bool, T)> {
    let mut worst = T::zero();
    for r in &rep.relators {
        worst = worst.max(extend_cocycle(rep, c, r)?.norm());
    }
    Ok((worst <= tol, worst))
}

/// Matrix of `v ↦ (v − Ad ρ(γᵢ) v)ᵢ` in coordinates.
fn coboundary_matrix<T: Real>(rep: &MarkedRepresentation<T>) -> CMat<T> {
    let cols: Vec<Vec<Complex<T>>> = (0..3)
        .map(|k| {
            let mut e = [Complex::new(T::zero(), T::zero()); 3];
            e[k] = Complex::new(T::one(), T::zero());
            Cocycle::coboundary(rep, &SL2Vector::from_coords(e)).flatten()
        })
        .collect();
    CMat::from_columns(3 * rep.rank(), &cols)
}

/// Matrix of the linear map from cochains to relator values.
fn relator_matrix<T: Real>(rep: &MarkedRepresentation<T>) -> Result<CMat<T>> {
    let n = rep.rank();
    let mut cols = Vec::with_capacity(3 * n);
    for i in 0..n {
        for k in 0..3 {
            let mut c = Cocycle::zero(n);
            let mut e = [Complex::new(T::zero(), T::zero()); 3];
            e[k] = Complex::new(T::one(), T::zero());
            c.values[i] = SL2Vector::from_coords(e);
            let mut col = Vec::with_capacity(3 * rep.relators.len());
            for r in &rep.relators {
                col.extend(extend_cocycle(rep, &c, r)?.coords());
            }
            cols.push(col);
        }
    }
    Ok(CMat::from_columns(3 * rep.relators.len(), &cols))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CoboundarySolution<T: Real> {
    /// Minimum-norm least-squares `v`.
    pub v: SL2Vector<T>,
    /// `‖c − δv‖` over all generators.
    pub residual: T,
}

/// Least-squares solve of `z(γᵢ) = v − Ad ρ(γᵢ) v`.
pub fn solve_coboundary<T: Real>(rep: &MarkedRepresentation<T>, c: &Cocycle<T>, rank_tol: T) -> Result<CoboundarySolution<T>> {
    check_shape(rep, c)?;
    let (x, _) = coboundary_matrix(rep).lstsq(&c.flatten(), rank_tol);
    let v = SL2Vector::from_coords([x[0], x[1], x[2]]);
    let residual = (c - &Cocycle::coboundary(rep, &v)).norm();
    Ok(CoboundarySolution { v, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Dimensions {
    pub cocycles: usize,
    pub coboundaries: usize,
    pub cohomology: usize,
}

/// Complex dimensions of `Z¹`, `B¹` and `H¹ = Z¹/B¹`.
pub fn h1_dimension<T: Real>(rep: &MarkedRepresentation<T>, rank_tol: T) -> Result<H1Dimensions> {
    let n = 3 * rep.rank();
    let cocycles = n - relator_matrix(rep)?.rank(rank_tol);
    let coboundaries = coboundary_matrix(rep).rank(rank_tol);
    Ok(H1Dimensions { cocycles, coboundaries, cohomology: cocycles - coboundaries })
}

/// Dimension of the span of `cocycles` in `H¹`.
pub fn class_rank<T: Real>(rep: &MarkedRepresentation<T>, cocycles: &[Cocycle<T>], rank_tol: T) -> Result<usize> {
    let b = coboundary_matrix(rep);
    let mut cols: Vec<Vec<Complex<T>>> = (0..b.cols()).map(|j| (0..b.rows()).map(|i| b.get(i, j)).collect()).collect();
    let base = b.rank(rank_tol);
    for c in cocycles {
        check_shape(rep, c)?;
        cols.push(c.flatten());
    }
    Ok(CMat::from_columns(b.rows(), &cols).rank(rank_tol) - base)
}

fn align_sign<T: Real>(m: &MobiusTransform<T>, reference: &MobiusTransform<T>) -> [Complex<T>; 4] {
    let (e, r) = (m.entries(), reference.entries());
    let dist = |s: T| e.iter().zip(&r).fold(T::zero(), |acc, (x, y)| acc + (*x * s - *y).norm_sqr());
    let s = if dist(-T::one()) < dist(T::one()) { -T::one() } else { T::one() };
    e.map(|x| x * s)
}

/// `z(γᵢ) = (d/dw ρ_w(γᵢ)) ρ₀(γᵢ)⁻¹` at `w = 0` by central differences.
/// Lifts at `±h` are aligned with the lift at `0` before differencing.
pub fn tangent_cocycle<T: Real, F>(path: F, h: T) -> Result<Cocycle<T>>
where
    F: Fn(T) -> Result<MarkedRepresentation<T>>,
{
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if h < T::epsilon().sqrt() {
        return Err(Error::StepTooSmall(h.to_f64().unwrap_or(f64::NAN)));
    }
    let (r0, rp, rm) = (path(T::zero())?, path(h)?, path(-h)?);
    if rp.rank() != r0.rank() || rm.rank() != r0.rank() {
        return Err(Error::InvalidArgument("path changes the number of generators".into()));
    }
    let values = (0..r0.rank())
        .map(|i| {
            let g0 = r0.generators[i];
            let (p, m) = (align_sign(&rp.generators[i], &g0), align_sign(&rm.generators[i], &g0));
            let d: Vec<Complex<T>> = p.iter().zip(&m).map(|(x, y)| (*x - *y) / (h * T::lit(2.0))).collect();
            let [a, b, c, dd] = g0.inverse().entries();
            let prod = [d[0] * a + d[1] * c, d[0] * b + d[1] * dd, d[2] * a + d[3] * c, d[2] * b + d[3] * dd];
            SL2Vector::traceless_part(prod)
        })
        .collect();
    Ok(Cocycle { values })
}

/// `f_z̄ = ½(∂f/∂x + i ∂f/∂y)` for the field `f ∂/∂z`, by central
/// differences with step `h`.
pub fn strain<T: Real>(f: impl Fn(Complex<T>) -> Complex<T>, z: Complex<T>, h: T) -> Complex<T> {
    let dx = (f(z + Complex::new(h, T::zero())) - f(z - Complex::new(h, T::zero()))) / (h * T::lit(2.0));
    let dy = (f(z + Complex::new(T::zero(), h)) - f(z - Complex::new(T::zero(), h))) / (h * T::lit(2.0));
    (dx + dy * Complex::new(T::zero(), T::one())) * T::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-8;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn rc(rng: &mut ChaCha8Rng) -> Complex<f64> {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn rand_vec(rng: &mut ChaCha8Rng) -> SL2Vector<f64> {
        SL2Vector::new(rc(rng), rc(rng), rc(rng))
    }

    fn rand_mobius(rng: &mut ChaCha8Rng) -> MobiusTransform<f64> {
        loop {
            let (a, b, cc, d) = (rc(rng) * 2.0, rc(rng), rc(rng), rc(rng) * 2.0);
            if let Ok(m) = MobiusTransform::new(a, b, cc, d) {
                if (a * d - b * cc).norm() > 0.2 {
                    return m;
                }
            }
        }
    }

    fn torus_rep() -> MarkedRepresentation<f64> {
        MarkedRepresentation::torus(&EndParameter::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap())
    }

    #[test]
    fn relators_are_validated() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gens = vec![rand_mobius(&mut rng), rand_mobius(&mut rng)];
        assert!(MarkedRepresentation::new(gens.clone(), vec![vec![1, 2, -1, -2]]).is_err());
        assert_eq!(
            MarkedRepresentation::new(gens, vec![vec![1, 3]]),
            Err(Error::BadWord { letter: 3, generators: 2 })
        );
        let rep = torus_rep();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.starts_with(r#"{"generators":[["#));
        assert!(json.ends_with(r#""relators":[[1,2,-1,-2]]}"#));
        let back: MarkedRepresentation<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.relators(), rep.relators());
        assert!(serde_json::from_str::<MarkedRepresentation<f64>>(r#"{"generators":[],"extra":1}"#).is_err());
    }

    #[test]
    fn extension_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rep = MarkedRepresentation::free(vec![rand_mobius(&mut rng), rand_mobius(&mut rng), rand_mobius(&mut rng)]);
        let z = Cocycle::new(vec![rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng)]);
        assert_eq!(extend_cocycle(&rep, &z, &[]).unwrap(), SL2Vector::zero());
        assert!(extend_cocycle(&rep, &z, &[1, -1]).unwrap().norm() < 1e-12);
        assert!(extend_cocycle(&rep, &z, &[-2, 3, -3, 2]).unwrap().norm() < 1e-12);
        assert!(matches!(extend_cocycle(&rep, &z, &[0]), Err(Error::BadWord { letter: 0, .. })));
        assert!(matches!(extend_cocycle(&rep, &z, &[-4]), Err(Error::BadWord { letter: -4, .. })));
        assert!(extend_cocycle(&rep, &Cocycle::zero(2), &[1]).is_err());

        let v = rand_vec(&mut rng);
        let cob = Cocycle::coboundary(&rep, &v);
        for _ in 0..20 {
            let len = rng.gen_range(1..10);
            let word: Word = (0..len).map(|_| rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            let g = rep.evaluate(&word).unwrap();
            let expect = v - g.adjoint(&v);
            assert!((extend_cocycle(&rep, &cob, &word).unwrap() - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn cocycle_checks() {
        let rep = torus_rep();
        assert_eq!(is_cocycle(&rep, &Cocycle::zero(2), 1e-12).unwrap(), (true, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let cob = Cocycle::coboundary(&rep, &rand_vec(&mut rng));
            let (ok, res) = is_cocycle(&rep, &cob, 1e-12).unwrap();
            assert!(ok, "{res}");
        }
        let random = Cocycle::new(vec![rand_vec(&mut rng), rand_vec(&mut rng)]);
        let (ok, res) = is_cocycle(&rep, &random, 1e-6).unwrap();
        assert!(!ok && res > 1e-3);
    }

    #[test]
    fn coboundary_solving() {
        let rep = torus_rep();
        let zero = solve_coboundary(&rep, &Cocycle::zero(2), TOL).unwrap();
        assert_eq!(zero.v, SL2Vector::zero());
        assert_eq!(zero.residual, 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cob = Cocycle::coboundary(&rep, &rand_vec(&mut rng));
        let sol = solve_coboundary(&rep, &cob, TOL).unwrap();
        assert!(sol.residual < 1e-10);
        assert!((&Cocycle::coboundary(&rep, &sol.v) - &cob).norm() < 1e-10);

        // stretching along the common axis of the two holonomies
        let end = EndParameter::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let z0 = end.z0().unwrap();
        let one = c(1.0, 0.0);
        let frame = MobiusTransform::new(z0, one, one, c(0.0, 0.0)).unwrap();
        let stretch = frame.adjoint(&SL2Vector::new(one, c(0.0, 0.0), c(0.0, 0.0)));
        let z = Cocycle::new(vec![stretch, SL2Vector::zero()]);
        assert!(is_cocycle(&rep, &z, 1e-10).unwrap().0);
        assert!(solve_coboundary(&rep, &z, TOL).unwrap().residual > 0.1);
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(
            h1_dimension(&torus_rep(), TOL).unwrap(),
            H1Dimensions { cocycles: 4, coboundaries: 2, cohomology: 2 }
        );
        let trivial = MarkedRepresentation::<f64>::free(vec![]);
        assert_eq!(h1_dimension(&trivial, TOL).unwrap(), H1Dimensions { cocycles: 0, coboundaries: 0, cohomology: 0 });
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let free = MarkedRepresentation::free(vec![rand_mobius(&mut rng), rand_mobius(&mut rng)]);
        assert_eq!(h1_dimension(&free, TOL).unwrap(), H1Dimensions { cocycles: 6, coboundaries: 3, cohomology: 3 });
        for _ in 0..5 {
            let g = rand_mobius(&mut rng);
            assert_eq!(h1_dimension(&torus_rep().conjugate(&g), TOL).unwrap().cohomology, 2);
            assert_eq!(h1_dimension(&free.conjugate(&g), TOL).unwrap().cohomology, 3);
        }
    }

    #[test]
    fn tangent_cocycles() {
        let rep = torus_rep();
        let still = tangent_cocycle(|_w: f64| Ok(rep.clone()), 1e-4).unwrap();
        assert_eq!(still.norm(), 0.0);
        assert!(matches!(tangent_cocycle(|_w: f64| Ok(rep.clone()), 1e-10), Err(Error::StepTooSmall(_))));

        let x = SL2Vector::new(c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0));
        let conj = |w: f64| {
            // g_w = I + w X to first order is enough for the tangent
            let [p, q, r, s] = x.matrix();
            let one = c(1.0, 0.0);
            let g = MobiusTransform::new(one + p * w, q * w, r * w, one + s * w)?;
            Ok(rep.conjugate(&g))
        };
        let h = 1e-4;
        let z = tangent_cocycle(conj, h).unwrap();
        assert!(is_cocycle(&rep, &z, 10.0 * h * h).unwrap().0);
        assert!(solve_coboundary(&rep, &z, TOL).unwrap().residual < 1e-8);

        let a_path = |w: f64| Ok(MarkedRepresentation::torus(&EndParameter::new(c(1.0 + w, 0.0), c(0.0, 1.0))?));
        let b_path = |w: f64| Ok(MarkedRepresentation::torus(&EndParameter::new(c(1.0, 0.0), c(w, 1.0))?));
        let za = tangent_cocycle(a_path, h).unwrap();
        let zb = tangent_cocycle(b_path, h).unwrap();
        assert!(is_cocycle(&rep, &za, 10.0 * h * h).unwrap().0);
        assert!(is_cocycle(&rep, &zb, 10.0 * h * h).unwrap().0);
        assert!(solve_coboundary(&rep, &za, TOL).unwrap().residual > 1e-3);
        assert_eq!(class_rank(&rep, &[za, zb], 1e-6).unwrap(), 2);
    }

    #[test]
    fn strain_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let (a, b, cc, z) = (rc(&mut rng), rc(&mut rng), rc(&mut rng), rc(&mut rng) * 3.0);
            assert!(strain(|w| a * w * w + b * w + cc, z, 1e-4).norm() < 1e-8);
            assert!((strain(|w: Complex<f64>| w.conj(), z, 1e-4) - c(1.0, 0.0)).norm() < 1e-10);
            assert!((strain(|w: Complex<f64>| w * w.conj(), z, 1e-4) - z).norm() < 1e-8);
            let f = |w: Complex<f64>| w.conj() * w.conj() + w;
            let g = |w: Complex<f64>| w * w.conj();
            let lin = strain(|w| f(w) * a + g(w) * b, z, 1e-4);
            assert!((lin - (strain(f, z, 1e-4) * a + strain(g, z, 1e-4) * b)).norm() < 1e-8);
        }
    }
}
