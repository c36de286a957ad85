//! Small dense matrices over the associative division algebras, with the
//! handful of factorizations the samplers need.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Quaternion `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// `(z1, z2)` with `q = z1 + z2 j`.
    pub fn to_complex_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Scalar types of the sampled matrices.
pub trait Field:
    Copy + Debug + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    const BETA: u32;
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::from_real(1.0)
    }
    fn from_real(r: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
    /// Each real component independently `N(0, sd^2)`.
    fn gaussian<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Self;
    /// Eigenvalues of a Hermitian matrix, descending.
    fn hermitian_eigenvalues(a: &Mat<Self>) -> Vec<f64>;
}

fn normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    z * sd
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

impl Field for f64 {
    const BETA: u32 = 1;
    fn from_real(r: f64) -> Self {
        r
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Self {
        normal(rng, sd)
    }
    fn hermitian_eigenvalues(a: &Mat<Self>) -> Vec<f64> {
        let n = a.rows;
        if n == 1 {
            return vec![a[(0, 0)]];
        }
        if n == 2 {
            let (p, q, r) = (a[(0, 0)], a[(1, 1)], 0.5 * (a[(0, 1)] + a[(1, 0)]));
            let mid = 0.5 * (p + q);
            let rad = (0.25 * (p - q) * (p - q) + r * r).sqrt();
            return vec![mid + rad, mid - rad];
        }
        let m = DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
        sorted_desc(m.symmetric_eigenvalues().iter().copied().collect())
    }
}

impl Field for Complex64 {
    const BETA: u32 = 2;
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Self {
        Complex64::new(normal(rng, sd), normal(rng, sd))
    }
    fn hermitian_eigenvalues(a: &Mat<Self>) -> Vec<f64> {
        let n = a.rows;
        if n == 1 {
            return vec![a[(0, 0)].re];
        }
        if n == 2 {
            let (p, q) = (a[(0, 0)].re, a[(1, 1)].re);
            let r = 0.5 * (a[(0, 1)] + a[(1, 0)].conj());
            let mid = 0.5 * (p + q);
            let rad = (0.25 * (p - q) * (p - q) + r.norm_sqr()).sqrt();
            return vec![mid + rad, mid - rad];
        }
        let m = DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
        sorted_desc(m.symmetric_eigenvalues().iter().copied().collect())
    }
}

impl Field for Quaternion {
    const BETA: u32 = 4;
    fn from_real(r: f64) -> Self {
        Quaternion::new(r, 0.0, 0.0, 0.0)
    }
    fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }
    fn re(self) -> f64 {
        self.w
    }
    fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }
    fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Self {
        Quaternion::new(normal(rng, sd), normal(rng, sd), normal(rng, sd), normal(rng, sd))
    }
    fn hermitian_eigenvalues(a: &Mat<Self>) -> Vec<f64> {
        let doubled = Complex64::hermitian_eigenvalues(&complex_embedding(a));
        dedup_pairs(&doubled)
    }
}

/// `q = z1 + z2 j` maps to the 2x2 block `[[z1, z2], [-conj z2, conj z1]]`,
/// which is multiplicative and sends the quaternion adjoint to the complex one.
pub fn complex_embedding(a: &Mat<Quaternion>) -> Mat<Complex64> {
    let (r, c) = (a.rows, a.cols);
    let mut out = Mat::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let (z1, z2) = a[(i, j)].to_complex_pair();
            out[(i, j)] = z1;
            out[(i, c + j)] = z2;
            out[(r + i, j)] = -z2.conj();
            out[(r + i, c + j)] = z1.conj();
        }
    }
    out
}

/// Collapses the doubled spectrum of a quaternion self-dual embedding.
/// Pairs are averaged; a pair further apart than `1e-9 ||S||` is a bug upstream.
pub fn dedup_pairs(doubled: &[f64]) -> Vec<f64> {
    let norm = doubled.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    doubled
        .chunks(2)
        .map(|p| {
            debug_assert!((p[0] - p[1]).abs() <= 1e-9 * norm, "unpaired eigenvalues {p:?}");
            0.5 * (p[0] + p[1])
        })
        .collect()
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Field> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Field> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Field> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = T::from_real(v);
        }
        m
    }

    pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, sd: f64, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| T::gaussian(rng, sd)).collect();
        Self { rows, cols, data }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..o.cols {
                    out[(i, j)] = out[(i, j)] + a * o[(k, j)];
                }
            }
        }
        out
    }

    /// `self^* self`.
    pub fn gram(&self) -> Self {
        self.adjoint().matmul(self)
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].scale(d[i]))
    }

    /// `self * diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].scale(d[j]))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + o[(i, j)])
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re()).sum()
    }

    /// `max |(self^* self - I)_ij|`, a measure of non-unitarity.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).norm_sqr().sqrt());
            }
        }
        worst
    }

    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        T::hermitian_eigenvalues(self)
    }

    /// Upper-triangular `R` with positive real diagonal and `self = R^* R`.
    pub fn cholesky_upper(&self) -> Option<Self> {
        let n = self.rows;
        let mut r = Self::zeros(n, n);
        for i in 0..n {
            let mut d = self[(i, i)].re();
            for k in 0..i {
                d -= r[(k, i)].norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            let rii = d.sqrt();
            r[(i, i)] = T::from_real(rii);
            for j in i + 1..n {
                // (R^* R)_{ij} = sum_k conj(r_ki) r_kj
                let mut s = self[(i, j)];
                for k in 0..i {
                    s = s - r[(k, i)].conj() * r[(k, j)];
                }
                r[(i, j)] = s.scale(1.0 / rii);
            }
        }
        Some(r)
    }

    /// Inverse of an upper-triangular matrix with real diagonal.
    pub fn upper_inverse(&self) -> Self {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            inv[(j, j)] = T::from_real(1.0 / self[(j, j)].re());
            for i in (0..j).rev() {
                let mut s = T::zero();
                for k in i + 1..=j {
                    s = s + self[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = -(s.scale(1.0 / self[(i, i)].re()));
            }
        }
        inv
    }

    /// Orthonormalizes the columns (Gram-Schmidt, run twice). Coefficients
    /// multiply from the right so the same code works for quaternions.
    pub fn orthonormalize_columns(&mut self) {
        let (n, c) = (self.rows, self.cols);
        for j in 0..c {
            for _ in 0..2 {
                for k in 0..j {
                    let mut dot = T::zero();
                    for i in 0..n {
                        dot = dot + self[(i, k)].conj() * self[(i, j)];
                    }
                    for i in 0..n {
                        let u = self[(i, k)];
                        self[(i, j)] = self[(i, j)] - u * dot;
                    }
                }
            }
            let norm = (0..n).map(|i| self[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                self[(i, j)] = self[(i, j)].scale(1.0 / norm);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quaternion_algebra() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let k = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(i * j * k, Quaternion::from_real(-1.0));
    }

    #[test]
    fn embedding_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Mat<Quaternion> = Mat::gaussian(3, 2, 1.0, &mut rng);
        let b: Mat<Quaternion> = Mat::gaussian(2, 3, 1.0, &mut rng);
        let lhs = complex_embedding(&a.matmul(&b));
        let rhs = complex_embedding(&a).matmul(&complex_embedding(&b));
        for (x, y) in lhs.data.iter().zip(&rhs.data) {
            assert!((x - y).norm() < 1e-12);
        }
        let adj = complex_embedding(&a.adjoint());
        assert_eq!(adj, complex_embedding(&a).adjoint());
    }

    fn check_cholesky<T: Field>(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Mat<T> = Mat::gaussian(6, 3, 1.0, &mut rng);
        let s = x.gram();
        let r = s.cholesky_upper().unwrap();
        let back = r.gram();
        for (a, b) in back.data.iter().zip(&s.data) {
            assert!((*a - *b).norm_sqr().sqrt() < 1e-12);
        }
        let prod = r.matmul(&r.upper_inverse());
        assert!(prod.unitarity_defect() < 1e-12);
    }

    #[test]
    fn cholesky_all_fields() {
        check_cholesky::<f64>(2);
        check_cholesky::<Complex64>(3);
        check_cholesky::<Quaternion>(4);
    }

    fn check_eigen_trace<T: Field>(seed: u64, m: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Mat<T> = Mat::gaussian(m + 2, m, 1.0, &mut rng);
        let s = x.gram();
        let ev = s.hermitian_eigenvalues();
        assert_eq!(ev.len(), m);
        assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        assert!((ev.iter().sum::<f64>() - s.trace_re()).abs() < 1e-10);
        let sq = s.matmul(&s).trace_re();
        assert!((ev.iter().map(|v| v * v).sum::<f64>() - sq).abs() < 1e-9 * sq);
    }

    #[test]
    fn eigenvalues_all_fields() {
        for m in 1..=4 {
            check_eigen_trace::<f64>(5, m);
            check_eigen_trace::<Complex64>(6, m);
            check_eigen_trace::<Quaternion>(7, m);
        }
    }

    #[test]
    fn gram_schmidt_gives_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut q: Mat<Quaternion> = Mat::gaussian(4, 4, 1.0, &mut rng);
        q.orthonormalize_columns();
        assert!(q.unitarity_defect() < 1e-12);
        assert!(q.matmul(&q.adjoint()).unitarity_defect() < 1e-12);
    }
}
