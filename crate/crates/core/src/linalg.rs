//! Small dense vector and matrix kernels.
//!
//! Everything here is plain slice arithmetic; the factored kernels live in
//! [`crate::factored`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [T::zero(); 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail = ca.remainder().iter().zip(cb.remainder()).fold(T::zero(), |t, (&x, &y)| t + x * y);
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[inline]
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    // Scaled to avoid overflow for large entries.
    let scale = a.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let ss = a.iter().fold(T::zero(), |acc, &v| {
        let r = v / scale;
        acc + r * r
    });
    scale * ss.sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled<T: Scalar>(alpha: T, x: &[T]) -> Vec<T> {
    x.iter().map(|&v| alpha * v).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn all_finite<T: Scalar>(a: &[T]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from row-major data of length `n*n`.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                axpy(a, orow, dst);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, j)].abs()))
            .fold(T::zero(), T::max)
    }

    pub fn norm_fro(&self) -> T {
        norm2(&self.data)
    }

    /// Lower bound on the smallest eigenvalue of a symmetric matrix (Gershgorin discs).
    pub fn gershgorin_lower(&self) -> T {
        (0..self.n)
            .map(|i| {
                let off = (0..self.n)
                    .filter(|&j| j != i)
                    .fold(T::zero(), |acc, j| acc + self[(i, j)].abs());
                self[(i, i)] - off
            })
            .fold(T::infinity(), T::min)
    }

    pub fn min_diagonal(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).fold(T::infinity(), T::min)
    }

    /// Returns `self + shift * I`.
    pub fn shifted(&self, shift: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] += shift;
        }
        m
    }

    /// Cholesky factor `R` (upper triangular, row-major) with `RᵀR = self`.
    ///
    /// Fails when a pivot is not strictly positive.
    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        let n = self.n;
        let mut r = vec![T::zero(); n * n];
        for j in 0..n {
            let mut diag = self[(j, j)];
            for k in 0..j {
                let v = r[k * n + j];
                diag -= v * v;
            }
            if !(diag > T::zero()) || !diag.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let rjj = diag.sqrt();
            r[j * n + j] = rjj;
            for i in j + 1..n {
                let mut v = self[(j, i)];
                for k in 0..j {
                    v -= r[k * n + j] * r[k * n + i];
                }
                r[j * n + i] = v / rjj;
            }
        }
        Ok(Cholesky { n, r })
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Upper-triangular Cholesky factor `R` with `RᵀR = A`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    r: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Solves `Rᵀ y = b`.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= self.r[k * n + i] * y[k];
            }
            y[i] = v / self.r[i * n + i];
        }
        y
    }

    /// Solves `R x = y`.
    pub fn solve_upper(&self, y: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let row = &self.r[i * n..(i + 1) * n];
            let mut v = x[i];
            for k in i + 1..n {
                v -= row[k] * x[k];
            }
            x[i] = v / row[i];
        }
        x
    }

    /// Solves `RᵀR x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.solve_upper(&self.solve_lower(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_handles_large_entries() {
        let v = [3e200_f64, 4e200];
        assert!((norm2(&v) / 5e200 - 1.0).abs() < 1e-15);
        assert_eq!(norm2::<f64>(&[]), 0.0);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = DenseMatrix::from_row_major(3, vec![4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0]).unwrap();
        let ch = a.cholesky().unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = ch.solve(&b);
        let r = sub(&a.matvec(&x), &b);
        assert!(norm2(&r) < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_row_major(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(a.cholesky(), Err(Error::NotPositiveDefinite { pivot: 1 })));
    }

    #[test]
    fn gershgorin_bounds_spectrum() {
        let a = DenseMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        // eigenvalues 1 and 3
        assert_eq!(a.gershgorin_lower(), 1.0);
    }
}
