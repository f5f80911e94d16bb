//! Small dense and banded linear algebra used across the crate.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Self::new([[o, z], [z, o]])
    }

    pub fn from_real(r: [[T; 2]; 2]) -> Self {
        Self::new([
            [Complex::new(r[0][0], T::zero()), Complex::new(r[0][1], T::zero())],
            [Complex::new(r[1][0], T::zero()), Complex::new(r[1][1], T::zero())],
        ])
    }

    /// Hermitian matrix `[[d0, off], [conj(off), d1]]`.
    pub fn hermitian(d0: T, off: Complex<T>, d1: T) -> Self {
        Self::new([[Complex::new(d0, T::zero()), off], [off.conj(), Complex::new(d1, T::zero())]])
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        Self::new([[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]])
    }

    pub fn conj(&self) -> Self {
        Self::new([[self.m[0][0].conj(), self.m[0][1].conj()], [self.m[1][0].conj(), self.m[1][1].conj()]])
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new([[self.m[0][0] * s, self.m[0][1] * s], [self.m[1][0] * s, self.m[1][1] * s]])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == T::zero() {
            return None;
        }
        let inv = d.inv();
        Some(Self::new([[self.m[1][1] * inv, -self.m[0][1] * inv], [-self.m[1][0] * inv, self.m[0][0] * inv]]))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn is_hermitian_exact(&self) -> bool {
        *self == self.adjoint()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [T; 2] {
        let half = lit::<T>(0.5);
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let off = (self.m[0][1] + self.m[1][0].conj()).scale(half);
        let mean = (a + d) * half;
        let rad = ((a - d) * half).hypot(off.norm());
        [mean - rad, mean + rad]
    }
}

impl<T: Real> Index<(usize, usize)> for Mat2<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.m[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat2<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.m[i][j]
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        r
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        r
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }
}

/// Solves a tridiagonal system in place by the Thomas algorithm.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (so `lower[0]` is unused) and
/// `upper[i]` multiplies `x[i+1]` (so `upper[n-1]` is unused). Returns `None`
/// on a vanishing pivot.
pub fn solve_tridiagonal<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &mut [T]) -> Option<()> {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return Some(());
    }
    let mut c = vec![T::zero(); n];
    let mut beta = diag[0];
    if beta == T::zero() {
        return None;
    }
    c[0] = upper[0] / beta;
    rhs[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == T::zero() || !beta.is_finite() {
            return None;
        }
        c[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - c[i] * rhs[i + 1];
    }
    Some(())
}
