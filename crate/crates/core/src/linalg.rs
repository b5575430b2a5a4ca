//! Small dense kernels: row-major matrices and a column-oriented Householder QR.

use crate::scalar::{Field, Real};
use num_complex::Complex;
use num_traits::Zero;
use std::ops::{Index, IndexMut};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Copy + Zero> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mat<T> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `y = self · x` for a complex `x`.
    pub fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut re = T::zero();
            let mut im = T::zero();
            for (&a, xj) in self.row(i).iter().zip(x) {
                re += a * xj.re;
                im += a * xj.im;
            }
            *yi = Complex::new(re, im);
        }
    }

    /// Real matrix with every entry converted to complex.
    pub fn to_complex(&self) -> Mat<Complex<T>> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| Complex::new(a, T::zero())).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, a| m.max(a.abs()))
    }
}

impl<T: Real> Mat<Complex<T>> {
    /// `y = self · x`.
    pub fn matvec(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self
                .row(i)
                .iter()
                .zip(x)
                .fold(Complex::zero(), |acc, (a, b)| acc + a * b);
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }
}

/// Householder QR of a tall `m × n` matrix (`m ≥ n`), stored by columns.
///
/// `A = Q·[R; 0]` with `Q = H₀H₁⋯H_{n−1}`, each `H_k = I − τ_k v_k v_k†`
/// Hermitian and unitary.
#[derive(Clone, Debug)]
pub struct HouseholderQr<T: Real, S: Field<T>> {
    m: usize,
    n: usize,
    /// Column `j` holds `R[0..=j, j]` in its leading entries.
    cols: Vec<Vec<S>>,
    vs: Vec<Vec<S>>,
    taus: Vec<T>,
}

impl<T: Real, S: Field<T>> HouseholderQr<T, S> {
    /// Factors the matrix whose columns are `cols` (each of length `m`).
    pub fn factor(mut cols: Vec<Vec<S>>, m: usize) -> Self {
        let n = cols.len();
        assert!(m >= n, "QR needs a tall matrix");
        assert!(cols.iter().all(|c| c.len() == m));
        let mut vs = Vec::with_capacity(n);
        let mut taus = Vec::with_capacity(n);
        for k in 0..n {
            let (head, tail) = cols.split_at_mut(k + 1);
            let col = &mut head[k];
            let x = &col[k..];
            let norm = x.iter().map(|s| s.norm_sqr()).sum::<T>().sqrt();
            if norm == T::zero() {
                vs.push(vec![S::zero(); m - k]);
                taus.push(T::zero());
                continue;
            }
            let x0 = x[0];
            let phase = if x0.modulus() == T::zero() {
                S::from_real(T::one())
            } else {
                x0 * (T::one() / x0.modulus())
            };
            let alpha = -(phase * norm);
            let mut v: Vec<S> = x.to_vec();
            v[0] = v[0] - alpha;
            let vnorm2: T = v.iter().map(|s| s.norm_sqr()).sum();
            let tau = T::lit(2.0) / vnorm2;
            col[k] = alpha;
            for e in col[k + 1..].iter_mut() {
                *e = S::zero();
            }
            for other in tail.iter_mut() {
                let seg = &mut other[k..];
                let w = v
                    .iter()
                    .zip(seg.iter())
                    .fold(S::zero(), |acc, (&vi, &bi)| acc + vi.conj() * bi)
                    * tau;
                for (bi, &vi) in seg.iter_mut().zip(&v) {
                    *bi = *bi - vi * w;
                }
            }
            vs.push(v);
            taus.push(tau);
        }
        Self { m, n, cols, vs, taus }
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    #[inline]
    fn reflect(&self, k: usize, b: &mut [Complex<T>]) {
        let tau = self.taus[k];
        if tau == T::zero() {
            return;
        }
        let v = &self.vs[k];
        let seg = &mut b[k..];
        let w = v
            .iter()
            .zip(seg.iter())
            .fold(Complex::zero(), |acc: Complex<T>, (vi, bi)| {
                acc + vi.conj().to_complex() * bi
            })
            * tau;
        for (bi, vi) in seg.iter_mut().zip(v) {
            *bi = *bi - vi.to_complex() * w;
        }
    }

    /// `b ← Q† b`.
    pub fn apply_qh(&self, b: &mut [Complex<T>]) {
        debug_assert_eq!(b.len(), self.m);
        for k in 0..self.n {
            self.reflect(k, b);
        }
    }

    /// `b ← Q b`.
    pub fn apply_q(&self, b: &mut [Complex<T>]) {
        debug_assert_eq!(b.len(), self.m);
        for k in (0..self.n).rev() {
            self.reflect(k, b);
        }
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize) -> S {
        if i > j {
            S::zero()
        } else {
            self.cols[j][i]
        }
    }

    /// Smallest and largest `|R_ii|`.
    pub fn diag_extremes(&self) -> (T, T) {
        (0..self.n).fold((T::infinity(), T::zero()), |(lo, hi), i| {
            let d = self.cols[i][i].modulus();
            (lo.min(d), hi.max(d))
        })
    }

    /// Solves `R† y = g` (forward substitution).
    pub fn solve_rh(&self, g: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(g.len(), self.n);
        let mut y: Vec<Complex<T>> = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let col = &self.cols[i];
            let s = col[..i]
                .iter()
                .zip(&y)
                .fold(g[i], |acc, (rji, yj)| acc - rji.conj().to_complex() * yj);
            y.push(s / col[i].conj().to_complex());
        }
        y
    }

    /// Solves `R x = c` (back substitution, column oriented).
    pub fn solve_r(&self, c: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(c.len(), self.n);
        let mut c = c.to_vec();
        let mut x = vec![Complex::zero(); self.n];
        for j in (0..self.n).rev() {
            let col = &self.cols[j];
            let xj = c[j] / col[j].to_complex();
            x[j] = xj;
            for (ci, rij) in c[..j].iter_mut().zip(&col[..j]) {
                *ci = *ci - rij.to_complex() * xj;
            }
        }
        x
    }
}
