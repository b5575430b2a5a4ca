//! Collocation nodes on the disk, spectral differentiation matrices, the
//! fold identification `u(ρ, θ) = u(−ρ, θ + π)`, and quadrature weights.
//!
//! Canonical node ordering: global index `j + M_ρ·i`, where `j = 0..M_ρ` is
//! the radial index on the positive half line (`j = 0` is the boundary
//! `ρ = R`) and `i = 0..M_θ` the angular index with `θ_i = 2π(i+1)/M_θ`.

use crate::linalg::Mat;
use crate::quadrature;
use crate::scalar::Real;
use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("angular node count must be odd and at least 3, got {0}")]
    AngularCount(usize),
    #[error("radial node count must be at least 4, got {0}")]
    RadialCount(usize),
    #[error("disk radius must be positive, got {0}")]
    Radius(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Fourier × Chebyshev–Gauss–Lobatto collocation grid on `B_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid<T> {
    radius: T,
    m_theta: usize,
    m_rho: usize,
    theta: Vec<T>,
    rho_full: Vec<T>,
}

/// Builds the grid. `m_theta` must be odd so that `ρ = 0` splits the angular
/// modes symmetrically; `2·m_rho − 1` is odd, so `ρ = 0` is never a node.
pub fn build_disk_grid<T: Real>(
    radius: T,
    m_theta: usize,
    m_rho: usize,
) -> Result<DiskGrid<T>, GridError> {
    if m_theta < 3 || m_theta % 2 == 0 {
        return Err(GridError::AngularCount(m_theta));
    }
    if m_rho < 4 {
        return Err(GridError::RadialCount(m_rho));
    }
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(GridError::Radius(radius.to_f64().unwrap_or(f64::NAN)));
    }
    let mt = T::from_usize_lossy(m_theta);
    let theta = (1..=m_theta)
        .map(|i| T::lit(2.0) * T::PI() * T::from_usize_lossy(i) / mt)
        .collect();
    let n = 2 * m_rho - 1;
    let nf = T::from_usize_lossy(n);
    // sin form keeps ρ_{n−j} = −ρ_j bit-for-bit
    let rho_full = (0..=n)
        .map(|j| {
            let arg = T::PI() * (nf - T::lit(2.0) * T::from_usize_lossy(j)) / (T::lit(2.0) * nf);
            radius * arg.sin()
        })
        .collect();
    Ok(DiskGrid {
        radius,
        m_theta,
        m_rho,
        theta,
        rho_full,
    })
}

impl<T: Real> DiskGrid<T> {
    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn m_theta(&self) -> usize {
        self.m_theta
    }

    pub fn m_rho(&self) -> usize {
        self.m_rho
    }

    /// `θ_i = 2π(i+1)/M_θ`, `i = 0..M_θ`.
    pub fn theta_nodes(&self) -> &[T] {
        &self.theta
    }

    /// All `2M_ρ` Lobatto values `R·cos(jπ/(2M_ρ−1))`, descending from `R` to `−R`.
    pub fn rho_nodes_full(&self) -> &[T] {
        &self.rho_full
    }

    /// The `M_ρ` strictly positive radial nodes.
    pub fn rho_nodes_pos(&self) -> &[T] {
        &self.rho_full[..self.m_rho]
    }

    /// Number of unknowns `M_θ·M_ρ`.
    pub fn len(&self) -> usize {
        self.m_theta * self.m_rho
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of interior (constrained) nodes `M_θ·(M_ρ−1)`.
    pub fn interior_len(&self) -> usize {
        self.m_theta * (self.m_rho - 1)
    }

    #[inline]
    pub fn index(&self, j: usize, i: usize) -> usize {
        j + self.m_rho * i
    }

    /// Index into the interior vector (rows of the constraint) for `j ≥ 1`.
    #[inline]
    pub fn interior_index(&self, j: usize, i: usize) -> usize {
        debug_assert!(j >= 1);
        (j - 1) + (self.m_rho - 1) * i
    }

    /// Polar coordinates `(ρ, θ)` of a global node.
    pub fn node(&self, g: usize) -> (T, T) {
        let (j, i) = (g % self.m_rho, g / self.m_rho);
        (self.rho_full[j], self.theta[i])
    }

    /// Cartesian coordinates of a global node.
    pub fn cartesian(&self, g: usize) -> [T; 2] {
        let (r, t) = self.node(g);
        [r * t.cos(), r * t.sin()]
    }

    /// Evaluates `f(x)` at every node in canonical order.
    pub fn sample<V>(&self, mut f: impl FnMut([T; 2]) -> V) -> Vec<V> {
        (0..self.len()).map(|g| f(self.cartesian(g))).collect()
    }

    /// Evaluates `f(ρ, θ)` at every node in canonical order.
    pub fn sample_polar<V>(&self, mut f: impl FnMut(T, T) -> V) -> Vec<V> {
        (0..self.len())
            .map(|g| {
                let (r, t) = self.node(g);
                f(r, t)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    RhoFirst,
    RhoSecond,
    ThetaFirst,
    ThetaSecond,
}

/// A dense collocation differentiation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrix<T> {
    pub kind: DiffKind,
    pub matrix: Mat<T>,
}

impl<T: Real> DiffMatrix<T> {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Applies the matrix to a real sample vector.
    pub fn apply_real(&self, x: &[T]) -> Vec<T> {
        (0..self.rows())
            .map(|i| self.matrix.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect()
    }
}

fn check_odd<T: Real>(m_theta: usize) -> Result<T, GridError> {
    if m_theta < 3 || m_theta % 2 == 0 {
        return Err(GridError::AngularCount(m_theta));
    }
    Ok(T::from_usize_lossy(m_theta))
}

#[inline]
fn alt_sign<T: Real>(n: usize) -> T {
    if n % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Periodic first-derivative matrix on `M_θ` (odd) equispaced nodes.
pub fn diff_theta<T: Real>(m_theta: usize) -> Result<DiffMatrix<T>, GridError> {
    let m = check_odd::<T>(m_theta)?;
    let h = T::lit(2.0) * T::PI() / m;
    let matrix = Mat::from_fn(m_theta, m_theta, |p, q| {
        if p == q {
            T::zero()
        } else {
            let x = h * (T::from_usize_lossy(p) - T::from_usize_lossy(q));
            alt_sign::<T>(p + q) / (T::lit(2.0) * (x / T::lit(2.0)).sin())
        }
    });
    Ok(DiffMatrix {
        kind: DiffKind::ThetaFirst,
        matrix,
    })
}

/// Periodic second-derivative matrix on `M_θ` (odd) equispaced nodes.
pub fn diff_theta2<T: Real>(m_theta: usize) -> Result<DiffMatrix<T>, GridError> {
    let m = check_odd::<T>(m_theta)?;
    let h = T::lit(2.0) * T::PI() / m;
    let diag = -(m * m - T::one()) / T::lit(12.0);
    let matrix = Mat::from_fn(m_theta, m_theta, |p, q| {
        if p == q {
            diag
        } else {
            let half = h * (T::from_usize_lossy(p) - T::from_usize_lossy(q)) / T::lit(2.0);
            let s = half.sin();
            -alt_sign::<T>(p + q) * half.cos() / (T::lit(2.0) * s * s)
        }
    });
    Ok(DiffMatrix {
        kind: DiffKind::ThetaSecond,
        matrix,
    })
}

/// Chebyshev first-derivative matrix on the full `2M_ρ` Lobatto line
/// `[−R, R]`, diagonal by the negative-sum rule.
pub fn diff_rho<T: Real>(grid: &DiskGrid<T>) -> DiffMatrix<T> {
    let x = grid.rho_nodes_full();
    let n = x.len();
    let cbar = |l: usize| if l == 0 || l == n - 1 { T::lit(2.0) } else { T::one() };
    let mut matrix = Mat::from_fn(n, n, |l, m| {
        if l == m {
            T::zero()
        } else {
            cbar(l) * alt_sign::<T>(l + m) / (cbar(m) * (x[l] - x[m]))
        }
    });
    for l in 0..n {
        // sum smallest-magnitude entries first
        let mut off: Vec<T> = matrix.row(l).to_vec();
        off.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
        let s: T = off.into_iter().fold(T::zero(), |acc, v| acc + v);
        matrix[(l, l)] = -s;
    }
    DiffMatrix {
        kind: DiffKind::RhoFirst,
        matrix,
    }
}

/// Chebyshev second-derivative matrix, the square of [`diff_rho`].
pub fn diff_rho2<T: Real>(grid: &DiskGrid<T>) -> DiffMatrix<T> {
    let d = diff_rho(grid);
    DiffMatrix {
        kind: DiffKind::RhoSecond,
        matrix: d.matrix.matmul(&d.matrix),
    }
}

/// Folds a full-line radial matrix onto the positive half.
///
/// Returns `(D₁, D₂)`, both `M_ρ × M_ρ`: `D₁` couples positive nodes to
/// positive nodes and `D₂[j][l] = D[j][2M_ρ−1−l]` couples positive node `j`
/// to the negative node `−ρ_l`, whose value is `u(ρ_l, θ + π)`. Columns of
/// `D₂` are therefore indexed by the mirrored positive node.
pub fn split_fold_blocks<T: Real>(d: &DiffMatrix<T>) -> Result<(Mat<T>, Mat<T>), GridError> {
    let n = d.rows();
    if d.cols() != n {
        return Err(GridError::DimensionMismatch {
            expected: n,
            got: d.cols(),
        });
    }
    if n % 2 != 0 || n < 2 {
        return Err(GridError::DimensionMismatch {
            expected: n + 1,
            got: n,
        });
    }
    let m = n / 2;
    let d1 = Mat::from_fn(m, m, |j, l| d.matrix[(j, l)]);
    let d2 = Mat::from_fn(m, m, |j, l| d.matrix[(j, n - 1 - l)]);
    Ok((d1, d2))
}

/// How values at `θ + π` are obtained on an odd angular grid, where
/// `θ_i + π` falls halfway between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FoldKind {
    /// Trigonometric interpolation: exact half-period shift of the
    /// interpolant (`e^{imθ} → (−1)^m e^{imθ}`).
    #[default]
    Spectral,
    /// Cyclic index shift by `(M_θ−1)/2`, i.e. the nearest node at
    /// `θ + π − π/M_θ`.
    IndexShift,
}

/// The angular half-turn operator `P`, `(P v)(θ_i) ≈ v(θ_i + π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFold<T> {
    kind: FoldKind,
    m_theta: usize,
    matrix: Mat<T>,
}

impl<T: Real> AngularFold<T> {
    pub fn new(kind: FoldKind, m_theta: usize) -> Result<Self, GridError> {
        let m = check_odd::<T>(m_theta)?;
        let matrix = match kind {
            FoldKind::Spectral => {
                let h = T::lit(2.0) * T::PI() / m;
                Mat::from_fn(m_theta, m_theta, |i, q| {
                    let a = h * (T::from_usize_lossy(i) - T::from_usize_lossy(q)) + T::PI();
                    (m * a / T::lit(2.0)).sin() / (m * (a / T::lit(2.0)).sin())
                })
            }
            FoldKind::IndexShift => {
                let s = (m_theta - 1) / 2;
                Mat::from_fn(m_theta, m_theta, |i, q| {
                    if q == (i + s) % m_theta {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
            }
        };
        Ok(Self {
            kind,
            m_theta,
            matrix,
        })
    }

    pub fn kind(&self) -> FoldKind {
        self.kind
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    /// Eigenvalue of `P` on the Fourier mode `e^{imθ}`.
    pub fn eigenvalue(&self, mode: i64) -> Complex<T> {
        match self.kind {
            FoldKind::Spectral => {
                if mode.rem_euclid(2) == 0 {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(-T::one(), T::zero())
                }
            }
            FoldKind::IndexShift => {
                let s = ((self.m_theta - 1) / 2) as i64;
                let m = self.m_theta as i64;
                let k = (mode * s).rem_euclid(m);
                let ang = T::lit(2.0) * T::PI() * T::from_i64(k).unwrap() / T::from_usize_lossy(self.m_theta);
                Complex::new(ang.cos(), ang.sin())
            }
        }
    }

    /// `out[j, i] = Σ_q P[i, q]·v[j, q]` on a `rows × M_θ` field stored
    /// radial-fastest.
    pub fn apply(&self, v: &[Complex<T>], rows: usize, out: &mut [Complex<T>]) {
        angular_apply(&self.matrix, false, v, rows, out);
    }

    /// Same with `Pᵀ`.
    pub fn apply_transpose(&self, v: &[Complex<T>], rows: usize, out: &mut [Complex<T>]) {
        angular_apply(&self.matrix, true, v, rows, out);
    }
}

/// `out[j, i] = Σ_q A[i, q]·v[j, q]` (or `A[q, i]` when `transpose`).
pub(crate) fn angular_apply<T: Real>(
    a: &Mat<T>,
    transpose: bool,
    v: &[Complex<T>],
    rows: usize,
    out: &mut [Complex<T>],
) {
    let m = a.rows();
    debug_assert_eq!(v.len(), rows * m);
    out.iter_mut().for_each(|o| *o = Complex::zero());
    for i in 0..m {
        let dst = &mut out[i * rows..(i + 1) * rows];
        for q in 0..m {
            let c = if transpose { a[(q, i)] } else { a[(i, q)] };
            if c == T::zero() {
                continue;
            }
            for (d, s) in dst.iter_mut().zip(&v[q * rows..(q + 1) * rows]) {
                *d += s * c;
            }
        }
    }
}

/// Product-integration weights on the positive Lobatto nodes:
/// `w_j = ∫_{−R}^{R} ℓ_j(s)·|s|·profile(|s|) ds`, where `ℓ_j` is the Lagrange
/// cardinal polynomial of the full `2M_ρ`-point line.
///
/// For any integrand whose restriction to a diameter is smooth, the sum over
/// positive nodes integrates `∫₀^R g(ρ) ρ·profile(ρ) dρ` spectrally; it is
/// exact when `g` is an even polynomial of degree `≤ 2M_ρ − 1`.
pub fn radial_product_weights<T: Real>(grid: &DiskGrid<T>, profile: impl Fn(T) -> T) -> Vec<T> {
    let r = grid.radius();
    let n = 2 * grid.m_rho() - 1;
    let nf = T::from_usize_lossy(n);
    // even Chebyshev moments μ_h = 2R ∫₀^{π/2} cos(hφ) ω(R cos φ) sin φ dφ
    let (phi, wphi) = quadrature::composite(T::zero(), T::FRAC_PI_2(), n.div_ceil(2) + 8, 12);
    let mut mu = vec![T::zero(); n + 1];
    for (p, w) in phi.iter().zip(&wphi) {
        let x = p.cos();
        let s = r * x;
        let f = T::lit(2.0) * r * *w * s * profile(s) * p.sin();
        let (mut t0, mut t1) = (T::one(), x);
        mu[0] += f;
        for h in 1..=n {
            if h % 2 == 0 {
                mu[h] += f * t1;
            }
            let t2 = T::lit(2.0) * x * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
    }
    let cbar = |h: usize| if h == 0 || h == n { T::lit(2.0) } else { T::one() };
    let cos_tab: Vec<T> = (0..2 * n)
        .map(|q| (T::PI() * T::from_usize_lossy(q) / nf).cos())
        .collect();
    (0..grid.m_rho())
        .map(|j| {
            let s: T = (0..=n)
                .step_by(2)
                .map(|h| cos_tab[(h * j) % (2 * n)] * mu[h] / cbar(h))
                .sum();
            T::lit(2.0) * s / (nf * cbar(j))
        })
        .collect()
}

fn expand_angular<T: Real>(grid: &DiskGrid<T>, radial: &[T]) -> Vec<T> {
    let dtheta = T::lit(2.0) * T::PI() / T::from_usize_lossy(grid.m_theta());
    (0..grid.len())
        .map(|g| radial[g % grid.m_rho()] * dtheta)
        .collect()
}

/// Diagonal of the functional weight `𝒲₁ = 𝒲₂`: quadrature for
/// `∫₀^{2π}∫₀^R g·ρ/(1+ρ) dρ dθ`, one entry per node in canonical order.
pub fn quadrature_weights<T: Real>(grid: &DiskGrid<T>) -> Vec<T> {
    let radial = radial_product_weights(grid, |s| T::one() / (T::one() + s));
    expand_angular(grid, &radial)
}

/// Plain area quadrature `∫_{B_R} g dA` on the grid nodes.
pub fn area_weights<T: Real>(grid: &DiskGrid<T>) -> Vec<T> {
    let radial = radial_product_weights(grid, |_| T::one());
    expand_angular(grid, &radial)
}
