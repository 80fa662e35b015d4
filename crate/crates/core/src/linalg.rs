//! Small dense square matrices over any [`Real`] scalar.
//!
//! Metric tensors are at most ~16×16 here, so a row-major `Vec` with
//! Gauss–Jordan inversion and Cholesky is all that is needed. Pivoting
//! compares real parts, which keeps the routines usable on dual numbers.

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    a: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(f(i, j));
            }
        }
        Self { n, a }
    }

    /// Diagonal matrix with the given entries.
    pub fn diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.a
    }

    pub fn map<S>(&self, f: impl FnMut(&T) -> S) -> Mat<S> {
        Mat { n: self.n, a: self.a.iter().map(f).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|&v| v * s)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                for j in 0..n {
                    m[(i, j)] = m[(i, j)] + aik * o[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::zero(), |s, j| s + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |s, i| s + self[(i, i)])
    }

    /// Largest |a_ij − a_ji|.
    pub fn asymmetry(&self) -> T {
        let mut r = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                r = r.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        r
    }

    pub fn max_abs(&self) -> T {
        self.a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Inverse and determinant by Gauss–Jordan elimination with partial
    /// pivoting. `None` if a pivot is exactly zero.
    pub fn inverse_det(&self) -> Option<(Self, T)> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let mut det = T::one();
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if a[(r, c)].abs() > a[(p, c)].abs() {
                    p = r;
                }
            }
            let piv = a[(p, c)];
            if piv == T::zero() {
                return None;
            }
            if p != c {
                for j in 0..n {
                    a.a.swap(p * n + j, c * n + j);
                    inv.a.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            det = det * piv;
            let ip = T::one() / piv;
            for j in 0..n {
                a[(c, j)] = a[(c, j)] * ip;
                inv[(c, j)] = inv[(c, j)] * ip;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                if f == T::zero() && f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] = a[(r, j)] - f * a[(c, j)];
                    inv[(r, j)] = inv[(r, j)] - f * inv[(c, j)];
                }
            }
        }
        Some((inv, det))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.inverse_det().map(|(m, _)| m)
    }

    pub fn det(&self) -> T {
        self.inverse_det().map_or(T::zero(), |(_, d)| d)
    }

    /// Lower-triangular `L` with `L Lᵀ = self`; `None` unless positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(l)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.a[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.a[i * self.n + j]
    }
}
