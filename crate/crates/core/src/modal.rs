//! Exact KKT solves for rotation-invariant media, one Fourier mode at a
//! time. Used directly when `n = n(ρ)` and as the GMRES preconditioner
//! otherwise (with `n` replaced by its angular mean).
//!
//! For mode `m` the constraint block is `A_m = (L₁ + e_m L₂)[1.., :] −
//! m²/ρ² + k²n̄²` (size `(M_ρ−1) × M_ρ`), `e_m` the fold eigenvalue. With
//! `A_m† = Q[R; 0]` the KKT system splits into a triangular solve for the
//! particular part, a scalar for the one-dimensional null space of `A_m`,
//! and a triangular solve for the multiplier.

use crate::assembly::DiscreteSystem;
use crate::fourier::AngularDft;
use crate::grid::FoldKind;
use crate::linalg::{HouseholderQr, Mat};
use crate::scalar::{dot, Real};
use num_complex::Complex;
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone)]
enum Qr<T: Real> {
    Real(HouseholderQr<T, T>),
    Complex(HouseholderQr<T, Complex<T>>),
}

impl<T: Real> Qr<T> {
    fn apply_q(&self, b: &mut [Complex<T>]) {
        match self {
            Self::Real(q) => q.apply_q(b),
            Self::Complex(q) => q.apply_q(b),
        }
    }
    fn apply_qh(&self, b: &mut [Complex<T>]) {
        match self {
            Self::Real(q) => q.apply_qh(b),
            Self::Complex(q) => q.apply_qh(b),
        }
    }
    fn solve_rh(&self, g: &[Complex<T>]) -> Vec<Complex<T>> {
        match self {
            Self::Real(q) => q.solve_rh(g),
            Self::Complex(q) => q.solve_rh(g),
        }
    }
    fn solve_r(&self, c: &[Complex<T>]) -> Vec<Complex<T>> {
        match self {
            Self::Real(q) => q.solve_r(c),
            Self::Complex(q) => q.solve_r(c),
        }
    }
    fn diag_extremes(&self) -> (T, T) {
        match self {
            Self::Real(q) => q.diag_extremes(),
            Self::Complex(q) => q.diag_extremes(),
        }
    }
}

/// Factorized KKT block of one Fourier mode.
#[derive(Debug, Clone)]
pub struct ModeBlock<T: Real> {
    mode: i64,
    qr: Qr<T>,
    /// `D₁ + e_m D₂`
    d_m: Mat<Complex<T>>,
    kn: Vec<T>,
    m_inv_rho: Vec<T>,
    weights: Vec<T>,
    z: Vec<Complex<T>>,
    hz: Vec<Complex<T>>,
    zhz: T,
}

impl<T: Real> ModeBlock<T> {
    pub fn mode(&self) -> i64 {
        self.mode
    }

    /// Rough conditioning indicator `max|R_ii| / min|R_ii|` of `A_m`.
    pub fn diag_ratio(&self) -> T {
        let (lo, hi) = self.qr.diag_extremes();
        hi / lo
    }

    /// `z†H̃_m z` for the unit null vector `z` of `A_m`; zero would mean the
    /// mode admits a homogeneous solution with vanishing functional.
    pub fn null_energy(&self) -> T {
        self.zhz
    }

    /// `H̃_m v = H_m†𝒲H_m v` with `H_m = [D_m − ikn̄; im/ρ]`.
    pub fn hessian(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = v.len();
        let mut y1 = vec![Complex::zero(); n];
        self.d_m.matvec(v, &mut y1);
        for g in 0..n {
            y1[g] = (y1[g] - v[g] * Complex::new(T::zero(), self.kn[g])) * self.weights[g];
        }
        // D_m† y₁
        let mut out = vec![Complex::zero(); n];
        for (j, yj) in y1.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.d_m.row(j)) {
                *o += a.conj() * yj;
            }
        }
        for g in 0..n {
            let mr = self.m_inv_rho[g];
            out[g] += y1[g] * Complex::new(T::zero(), self.kn[g]) + v[g] * (mr * mr * self.weights[g]);
        }
        out
    }

    /// Solves `A_m v = g`, `H̃_m v + A_m†λ = h`.
    pub fn solve(&self, g: &[Complex<T>], h: &[Complex<T>]) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let n = h.len();
        let mut vp = self.qr.solve_rh(g);
        vp.push(Complex::zero());
        self.qr.apply_q(&mut vp);
        let c = (dot(&self.z, h) - dot(&self.hz, &vp)) / self.zhz;
        let v: Vec<Complex<T>> = vp.iter().zip(&self.z).map(|(p, z)| p + z * c).collect();
        let hv = self.hessian(&v);
        let mut r: Vec<Complex<T>> = h.iter().zip(&hv).map(|(a, b)| a - b).collect();
        self.qr.apply_qh(&mut r);
        let lambda = self.qr.solve_r(&r[..n - 1]);
        (v, lambda)
    }
}

/// Block-diagonal (in Fourier space) KKT solver of the angularly averaged
/// problem.
#[derive(Debug, Clone)]
pub struct ModalKkt<T: Real> {
    dft: AngularDft<T>,
    m_rho: usize,
    /// One entry per DFT slot; slots with equal blocks share them.
    blocks: Vec<Arc<ModeBlock<T>>>,
    exact: bool,
}

impl<T: Real> ModalKkt<T> {
    pub fn new(system: &DiscreteSystem<T>) -> Self {
        let ops = system.operators();
        let grid = ops.grid();
        let m = grid.m_rho();
        let k = system.k();
        let medium = system.medium();
        let nbar = medium.mean_n();
        let k2n2: Vec<T> = medium.mean_n_squared().iter().map(|v| k * k * *v).collect();
        let kn: Vec<T> = nbar.iter().map(|v| k * *v).collect();
        let weights = ops.weights()[..m].to_vec();
        let (d1, d2) = ops.radial_first();
        let (l1, l2) = ops.radial_laplacian();
        let inv_rho = ops.inv_rho();
        let dft = AngularDft::new(grid.m_theta());
        let spectral = ops.fold().kind() == FoldKind::Spectral;

        let build = |mode: i64| -> ModeBlock<T> {
            let e = ops.fold().eigenvalue(mode);
            let mf = T::from_i64(mode).unwrap();
            let m_inv_rho: Vec<T> = inv_rho.iter().map(|r| mf * *r).collect();
            // columns of A_m† = conjugated rows of A_m
            let row = |j: usize| -> Vec<Complex<T>> {
                (0..m)
                    .map(|l| {
                        let mut a = Complex::new(l1[(j, l)], T::zero()) + e * l2[(j, l)];
                        if l == j {
                            a += Complex::new(k2n2[j] - m_inv_rho[j] * m_inv_rho[j], T::zero());
                        }
                        a.conj()
                    })
                    .collect()
            };
            let qr = if e.im == T::zero() {
                Qr::Real(HouseholderQr::factor(
                    (1..m).map(|j| row(j).into_iter().map(|c| c.re).collect()).collect(),
                    m,
                ))
            } else {
                Qr::Complex(HouseholderQr::factor((1..m).map(row).collect(), m))
            };
            let d_m = Mat::from_fn(m, m, |j, l| Complex::new(d1[(j, l)], T::zero()) + e * d2[(j, l)]);
            let mut z = vec![Complex::zero(); m];
            z[m - 1] = Complex::new(T::one(), T::zero());
            qr.apply_q(&mut z);
            let mut block = ModeBlock {
                mode,
                qr,
                d_m,
                kn: kn.clone(),
                m_inv_rho,
                weights: weights.clone(),
                z,
                hz: Vec::new(),
                zhz: T::zero(),
            };
            block.hz = block.hessian(&block.z);
            block.zhz = dot(&block.z, &block.hz).re;
            block
        };

        let mut cache: HashMap<i64, Arc<ModeBlock<T>>> = HashMap::new();
        let blocks = (0..dft.len())
            .map(|q| {
                let mode = dft.mode(q);
                // with the spectral fold, modes ±m share A_m and H̃_m
                let key = if spectral { mode.abs() } else { mode };
                cache.entry(key).or_insert_with(|| Arc::new(build(key))).clone()
            })
            .collect();
        let exact = medium.is_radial()
            && system.options().form == crate::assembly::FunctionalForm::Polar;
        Self {
            dft,
            m_rho: m,
            blocks,
            exact,
        }
    }

    /// True when this is the exact inverse of the KKT operator (radial
    /// medium, polar functional).
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn blocks(&self) -> impl Iterator<Item = &ModeBlock<T>> {
        self.blocks.iter().map(|b| b.as_ref())
    }

    /// Applies the inverse to `[r₁; r₂]` (constraint rows first).
    pub fn solve(&self, r: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.m_rho;
        let nt = self.dft.len();
        let (r1, r2) = r.split_at((m - 1) * nt);
        let g = self.dft.forward(r1, m - 1);
        let h = self.dft.forward(r2, m);
        let mut vhat = vec![Complex::zero(); m * nt];
        let mut lhat = vec![Complex::zero(); (m - 1) * nt];
        for (q, block) in self.blocks.iter().enumerate() {
            let (v, l) = block.solve(&g[q * (m - 1)..(q + 1) * (m - 1)], &h[q * m..(q + 1) * m]);
            vhat[q * m..(q + 1) * m].copy_from_slice(&v);
            lhat[q * (m - 1)..(q + 1) * (m - 1)].copy_from_slice(&l);
        }
        let mut out = self.dft.inverse(&vhat, m);
        out.extend(self.dft.inverse(&lhat, m - 1));
        out
    }
}
