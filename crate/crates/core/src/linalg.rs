//! Small dense linear algebra: one-sided Jacobi SVD, numerical rank and
//! minimum-norm least squares. Sized for the 3×3 Jacobians and the
//! `3g × 3r` cohomology systems used elsewhere in the crate.

use num_complex::Complex;

use crate::scalar::Real;

/// Row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |s, j| s + self.get(i, j) * x[j]))
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// `A = U diag(s) Vᵀ` with `s` sorted descending; `U` is `m × k`, `V` is
/// `n × k`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Mat<T>,
    pub s: Vec<T>,
    pub v: Mat<T>,
}

impl<T: Real> Svd<T> {
    /// Number of singular values above `rel_tol · s_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let Some(&top) = self.s.first() else { return 0 };
        if top <= T::zero() {
            return 0;
        }
        self.s.iter().filter(|&&x| x > rel_tol * top).count()
    }

    /// Minimum-norm least-squares solution of `A x = b`, truncating singular
    /// values at `rel_tol · s_max`.
    pub fn solve(&self, b: &[T], rel_tol: T) -> Vec<T> {
        let n = self.v.rows();
        let mut x = vec![T::zero(); n];
        let r = self.rank(rel_tol);
        for k in 0..r {
            let coef = (0..self.u.rows()).fold(T::zero(), |s, i| s + self.u.get(i, k) * b[i]) / self.s[k];
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = *xj + coef * self.v.get(j, k);
            }
        }
        x
    }
}

pub fn svd<T: Real>(a: &Mat<T>) -> Svd<T> {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = (a.rows, a.cols);
    let mut u = a.clone();
    let mut v = Mat::zeros(n, n);
    for i in 0..n {
        v.set(i, i, T::one());
    }
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (x, y) = (u.get(i, p), u.get(i, q));
                    alpha = alpha + x * x;
                    beta = beta + y * y;
                    gamma = gamma + x * y;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (u.get(i, p), u.get(i, q));
                    u.set(i, p, c * x - s * y);
                    u.set(i, q, s * x + c * y);
                }
                for i in 0..n {
                    let (x, y) = (v.get(i, p), v.get(i, q));
                    v.set(i, p, c * x - s * y);
                    v.set(i, q, s * x + c * y);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sig: Vec<(T, usize)> = (0..n)
        .map(|j| {
            let norm = (0..m).fold(T::zero(), |s, i| s + u.get(i, j) * u.get(i, j)).sqrt();
            (norm, j)
        })
        .collect();
    sig.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut uo = Mat::zeros(m, n);
    let mut vo = Mat::zeros(n, n);
    for (k, &(s, j)) in sig.iter().enumerate() {
        for i in 0..m {
            let val = if s > T::zero() { u.get(i, j) / s } else { T::zero() };
            uo.set(i, k, val);
        }
        for i in 0..n {
            vo.set(i, k, v.get(i, j));
        }
    }
    Svd { u: uo, s: sig.into_iter().map(|(s, _)| s).collect(), v: vo }
}

/// Row-major complex matrix, handled through its real `2m × 2n` form
/// `[[Re, −Im], [Im, Re]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, cols: &[Vec<Complex<T>>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &z) in col.iter().enumerate() {
                m.set(i, j, z);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Complex::new(T::zero(), T::zero()), |s, j| s + self.get(i, j) * x[j])
            })
            .collect()
    }

    fn realify(&self) -> Mat<T> {
        let mut r = Mat::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                r.set(i, j, z.re);
                r.set(i, j + self.cols, -z.im);
                r.set(i + self.rows, j, z.im);
                r.set(i + self.rows, j + self.cols, z.re);
            }
        }
        r
    }

    /// Complex singular values, descending (each real singular value of the
    /// realified matrix appears twice; one copy is kept).
    pub fn singular_values(&self) -> Vec<T> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        svd(&self.realify()).s.into_iter().step_by(2).collect()
    }

    /// Complex rank: singular values above `rel_tol · s_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        svd(&self.realify()).rank(rel_tol) / 2
    }

    /// Minimum-norm least-squares solution and the residual `‖A x − b‖`.
    pub fn lstsq(&self, b: &[Complex<T>], rel_tol: T) -> (Vec<Complex<T>>, T) {
        assert_eq!(b.len(), self.rows);
        if self.rows == 0 || self.cols == 0 {
            let res = b.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
            return (vec![Complex::new(T::zero(), T::zero()); self.cols], res);
        }
        let rb: Vec<T> = b.iter().map(|z| z.re).chain(b.iter().map(|z| z.im)).collect();
        let xr = svd(&self.realify()).solve(&rb, rel_tol);
        let x: Vec<Complex<T>> = (0..self.cols).map(|j| Complex::new(xr[j], xr[j + self.cols])).collect();
        let ax = self.mul_vec(&x);
        let res = ax
            .iter()
            .zip(b)
            .fold(T::zero(), |s, (p, q)| s + (*p - *q).norm_sqr())
            .sqrt();
        (x, res)
    }
}
