//! Fourier–Chebyshev interpolation of nodal solutions, the exact solution for
//! constant index and Gaussian sources, error norms on a comparison disk, and
//! log–log rate fits.

use crate::grid::{area_weights, build_disk_grid, DiskGrid, GridError};
use crate::problems::{Point, RefractionKind, SourceKind};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;
use crate::specfun::{bessel_j0, bessel_j1, hankel_h0, hankel_h1};
use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("point with rho = {rho} lies outside the disk of radius {radius}")]
    OutsideDisk { rho: f64, radius: f64 },
    #[error("exact solution needs a constant refraction index")]
    UnsupportedMedium,
    #[error("exact solution needs a Gaussian-sum source")]
    UnsupportedSource,
    #[error("field has {got} values, grid has {expected} nodes")]
    Length { expected: usize, got: usize },
    #[error("comparison radius {rho} must lie in (0, {radius})")]
    ComparisonRadius { rho: f64, radius: f64 },
    #[error("rate fit needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("rate fit needs positive samples, got ({0}, {1})")]
    NonPositiveSample(f64, f64),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Coefficients `c_{m,h}` of `u(ρ,θ) = Σ_m Σ_h c_{m,h} T_h(ρ/R) e^{imθ}`,
/// `|m| ≤ (M_θ−1)/2`, `0 ≤ h ≤ 2M_ρ−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients<T> {
    radius: T,
    m_theta: usize,
    n_cheb: usize,
    modes: Vec<Complex<T>>,
    /// Coefficients of `∂_ρ u`, same layout.
    d_modes: Vec<Complex<T>>,
}

impl<T: Real> SpectralCoefficients<T> {
    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn half_width(&self) -> i64 {
        ((self.m_theta - 1) / 2) as i64
    }

    /// Number of Chebyshev coefficients per mode (`2M_ρ`).
    pub fn chebyshev_len(&self) -> usize {
        self.n_cheb
    }

    /// `c_{m,h}`, zero outside the stored range.
    pub fn coefficient(&self, m: i64, h: usize) -> Complex<T> {
        let k = self.half_width();
        if m.abs() > k || h >= self.n_cheb {
            return Complex::zero();
        }
        self.modes[(m + k) as usize * self.n_cheb + h]
    }

    fn radial(&self, coeffs: &[Complex<T>], x: T) -> Complex<T> {
        clenshaw(coeffs, x)
    }

    /// Per-mode radial values `(R_m(ρ), R_m'(ρ))` for all modes.
    fn radial_all(&self, rho: T) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let x = rho / self.radius;
        let n = self.n_cheb;
        (0..self.m_theta)
            .map(|q| {
                (
                    self.radial(&self.modes[q * n..(q + 1) * n], x),
                    self.radial(&self.d_modes[q * n..(q + 1) * n], x),
                )
            })
            .unzip()
    }

    fn check(&self, rho: T) -> Result<(), AnalysisError> {
        let slack = self.radius * T::lit(1e-12);
        if rho < T::zero() || rho > self.radius + slack || !rho.is_finite() {
            return Err(AnalysisError::OutsideDisk {
                rho: rho.to_f64().unwrap_or(f64::NAN),
                radius: self.radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Value and polar derivatives `(u, ∂_ρu, ∂_θu)` at one point.
    pub fn evaluate_with_derivatives(
        &self,
        rho: T,
        theta: T,
    ) -> Result<(Complex<T>, Complex<T>, Complex<T>), AnalysisError> {
        self.check(rho)?;
        let (r, dr) = self.radial_all(rho);
        let k = self.half_width();
        let mut out = (Complex::zero(), Complex::zero(), Complex::zero());
        for (q, (rv, dv)) in r.iter().zip(&dr).enumerate() {
            let m = T::from_i64(q as i64 - k).unwrap();
            let e = Complex::from_polar(T::one(), m * theta);
            out.0 += rv * e;
            out.1 += dv * e;
            out.2 += rv * e * Complex::new(T::zero(), m);
        }
        Ok(out)
    }

    /// Values, `∂_ρ` and `∂_θ` on the tensor grid `rhos × thetas`, stored
    /// radial-fastest.
    pub fn evaluate_tensor(
        &self,
        rhos: &[T],
        thetas: &[T],
    ) -> Result<[Vec<Complex<T>>; 3], AnalysisError> {
        let nr = rhos.len();
        let mut out = [
            vec![Complex::zero(); nr * thetas.len()],
            vec![Complex::zero(); nr * thetas.len()],
            vec![Complex::zero(); nr * thetas.len()],
        ];
        let k = self.half_width();
        let phases: Vec<Vec<Complex<T>>> = thetas
            .iter()
            .map(|t| {
                (0..self.m_theta)
                    .map(|q| Complex::from_polar(T::one(), T::from_i64(q as i64 - k).unwrap() * *t))
                    .collect()
            })
            .collect();
        for (j, rho) in rhos.iter().enumerate() {
            self.check(*rho)?;
            let (r, dr) = self.radial_all(*rho);
            for (i, ph) in phases.iter().enumerate() {
                let mut acc = [Complex::zero(); 3];
                for q in 0..self.m_theta {
                    let m = T::from_i64(q as i64 - k).unwrap();
                    acc[0] += r[q] * ph[q];
                    acc[1] += dr[q] * ph[q];
                    acc[2] += r[q] * ph[q] * Complex::new(T::zero(), m);
                }
                for c in 0..3 {
                    out[c][j + nr * i] = acc[c];
                }
            }
        }
        Ok(out)
    }
}

/// `Σ c_h T_h(x)` by Clenshaw's recurrence.
fn clenshaw<T: Real>(c: &[Complex<T>], x: T) -> Complex<T> {
    let mut b1 = Complex::zero();
    let mut b2 = Complex::zero();
    for ch in c.iter().skip(1).rev() {
        let b0 = b1 * (T::lit(2.0) * x) - b2 + ch;
        b2 = b1;
        b1 = b0;
    }
    b1 * x - b2 + c[0]
}

/// Chebyshev coefficients of the derivative (w.r.t. `x`) of `Σ c_h T_h`.
fn chebyshev_derivative<T: Real>(c: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = c.len();
    let mut d = vec![Complex::zero(); n + 1];
    for k in (0..n.saturating_sub(1)).rev() {
        d[k] = d[k + 2] + c[k + 1] * T::from_usize_lossy(2 * (k + 1));
    }
    d[0] = d[0] / T::lit(2.0);
    d.truncate(n);
    d
}

/// Fourier–Chebyshev coefficients of a nodal field on `grid`.
///
/// The field is extended to the full diameter through `u(−ρ,θ) = u(ρ,θ+π)`,
/// which on mode `m` is multiplication by `(−1)^m`.
pub fn to_spectral<T: Real>(
    grid: &DiskGrid<T>,
    values: &[Complex<T>],
) -> Result<SpectralCoefficients<T>, AnalysisError> {
    if values.len() != grid.len() {
        return Err(AnalysisError::Length {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let m_rho = grid.m_rho();
    let m_theta = grid.m_theta();
    let dft = crate::fourier::AngularDft::new(m_theta);
    let vhat = dft.forward(values, m_rho);
    let n = 2 * m_rho - 1;
    let nf = T::from_usize_lossy(n);
    let cos_tab: Vec<T> = (0..2 * n)
        .map(|q| (T::PI() * T::from_usize_lossy(q) / nf).cos())
        .collect();
    let cbar = |h: usize| if h == 0 || h == n { T::lit(2.0) } else { T::one() };
    let mut modes = Vec::with_capacity(m_theta * (n + 1));
    let mut d_modes = Vec::with_capacity(m_theta * (n + 1));
    for q in 0..m_theta {
        let m = dft.mode(q);
        let parity = if m.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        let col = &vhat[q * m_rho..(q + 1) * m_rho];
        let full: Vec<Complex<T>> = (0..=n)
            .map(|l| if l < m_rho { col[l] } else { col[n - l] * parity })
            .collect();
        let c: Vec<Complex<T>> = (0..=n)
            .map(|h| {
                let s = full
                    .iter()
                    .enumerate()
                    .fold(Complex::zero(), |acc, (l, f)| {
                        acc + f * (cos_tab[(h * l) % (2 * n)] / cbar(l))
                    });
                s * (T::lit(2.0) / (nf * cbar(h)))
            })
            .collect();
        let inv_r = T::one() / grid.radius();
        d_modes.extend(chebyshev_derivative(&c).into_iter().map(|v| v * inv_r));
        modes.extend(c);
    }
    Ok(SpectralCoefficients {
        radius: grid.radius(),
        m_theta,
        n_cheb: n + 1,
        modes,
        d_modes,
    })
}

/// Values of the expansion at polar points `(ρ, θ)`.
pub fn evaluate_at<T: Real>(
    coeffs: &SpectralCoefficients<T>,
    points: &[(T, T)],
) -> Result<Vec<Complex<T>>, AnalysisError> {
    points
        .iter()
        .map(|&(r, t)| coeffs.evaluate_with_derivatives(r, t).map(|v| v.0))
        .collect()
}

/// Radial profile of the outgoing solution of `Δu + k²u = e^{−σ|x|²}`:
/// `U(r) = −(iπ/2)[H₀(kr)A(r) + J₀(kr)B(r)]` with `A = ∫₀^r J₀(ks)g s ds` and
/// `B = ∫_r^∞ H₀(ks)g s ds` (Graf's addition theorem averaged over angle).
#[derive(Debug, Clone)]
struct GaussianProfile<T> {
    k: T,
    sigma: T,
    edges: Vec<T>,
    /// `∫₀^{edge_p}` of `J₀(ks)g(s)s`.
    prefix_j: Vec<T>,
    /// `∫_{edge_p}^{S}` of `H₀(ks)g(s)s`.
    suffix_h: Vec<Complex<T>>,
    gl: (Vec<T>, Vec<T>),
}

impl<T: Real> GaussianProfile<T> {
    fn new(k: T, sigma: T) -> Self {
        let support = (T::lit(41.0) / sigma).sqrt();
        let panels = 64;
        let h = support / T::from_usize_lossy(panels);
        // geometric grading of the first panel toward the log singularity at 0
        let mut edges = vec![T::zero()];
        for p in (0..=24).rev() {
            edges.push(h * T::lit(0.5).powi(p));
        }
        for p in 2..=panels {
            edges.push(h * T::from_usize_lossy(p));
        }
        let gl = gauss_legendre::<T>(16);
        let mut this = Self {
            k,
            sigma,
            edges,
            prefix_j: Vec::new(),
            suffix_h: Vec::new(),
            gl,
        };
        let np = this.edges.len();
        let mut pj = vec![T::zero(); np];
        let mut sh = vec![Complex::zero(); np];
        for p in 1..np {
            pj[p] = pj[p - 1] + this.panel_j(this.edges[p - 1], this.edges[p]);
        }
        for p in (0..np - 1).rev() {
            sh[p] = sh[p + 1] + this.panel_h(this.edges[p], this.edges[p + 1]);
        }
        this.prefix_j = pj;
        this.suffix_h = sh;
        this
    }

    fn weight(&self, s: T) -> T {
        (-self.sigma * s * s).exp() * s
    }

    fn panel_j(&self, a: T, b: T) -> T {
        let (x, w) = &self.gl;
        let mid = (a + b) / T::lit(2.0);
        let half = (b - a) / T::lit(2.0);
        x.iter().zip(w).fold(T::zero(), |acc, (xi, wi)| {
            let s = mid + *xi * half;
            acc + bessel_j0(self.k * s).unwrap() * self.weight(s) * *wi * half
        })
    }

    fn panel_h(&self, a: T, b: T) -> Complex<T> {
        let (x, w) = &self.gl;
        let mid = (a + b) / T::lit(2.0);
        let half = (b - a) / T::lit(2.0);
        x.iter().zip(w).fold(Complex::zero(), |acc, (xi, wi)| {
            let s = mid + *xi * half;
            acc + hankel_h0(self.k * s).unwrap() * (self.weight(s) * *wi * half)
        })
    }

    /// `(U(r), U'(r))`.
    fn eval(&self, r: T) -> (Complex<T>, Complex<T>) {
        let pre = Complex::new(T::zero(), -T::FRAC_PI_2());
        let last = *self.edges.last().unwrap();
        if r == T::zero() {
            return (pre * self.suffix_h[0], Complex::zero());
        }
        let kr = self.k * r;
        let h0 = hankel_h0(kr).unwrap();
        let h1 = hankel_h1(kr).unwrap();
        let j0 = bessel_j0(kr).unwrap();
        let j1 = bessel_j1(kr).unwrap();
        let (a, b) = if r >= last {
            (self.prefix_j[self.edges.len() - 1], Complex::zero())
        } else {
            let p = self.edges.partition_point(|e| *e <= r) - 1;
            let a = self.prefix_j[p] + self.panel_j(self.edges[p], r);
            let b = self.suffix_h[p + 1] + self.panel_h(r, self.edges[p + 1]);
            (a, b)
        };
        let u = pre * (h0 * a + b * j0);
        // U' = (iπk/2)[H₁A + J₁B]; the boundary terms of A' and B' cancel
        let du = -pre * self.k * (h1 * a + b * j1);
        (u, du)
    }
}

/// Outgoing solution of `Δu + k²n²u = f` in the whole plane for constant
/// `n` and a Gaussian-sum `f`.
#[derive(Debug, Clone)]
pub struct ExactSolution<T> {
    terms: Vec<(Point<T>, T)>,
    profile: Option<GaussianProfile<T>>,
}

/// Builds the exact solution `u = −(i/4)∫H₀(kn|x−y|)f(y)dy`.
pub fn exact_solution_constant_n<T: Real>(
    source: &SourceKind<T>,
    refraction: &RefractionKind<T>,
    k: T,
) -> Result<ExactSolution<T>, AnalysisError> {
    let n = refraction
        .constant_value()
        .ok_or(AnalysisError::UnsupportedMedium)?;
    match source {
        SourceKind::GaussianSum { sigma, terms } => Ok(ExactSolution {
            terms: terms.clone(),
            profile: if terms.is_empty() {
                None
            } else {
                Some(GaussianProfile::new(k * n, *sigma))
            },
        }),
        _ => Err(AnalysisError::UnsupportedSource),
    }
}

impl<T: Real> ExactSolution<T> {
    /// `(u(x), ∇u(x))` with the gradient in Cartesian components.
    pub fn value_and_gradient(&self, x: Point<T>) -> (Complex<T>, [Complex<T>; 2]) {
        let mut u = Complex::zero();
        let mut g = [Complex::zero(); 2];
        let Some(profile) = &self.profile else {
            return (u, g);
        };
        for (c, sign) in &self.terms {
            let d = [x[0] - c[0], x[1] - c[1]];
            let r = d[0].hypot(d[1]);
            let (v, dv) = profile.eval(r);
            u += v * *sign;
            if r > T::zero() {
                g[0] += dv * (*sign * d[0] / r);
                g[1] += dv * (*sign * d[1] / r);
            }
        }
        (u, g)
    }

    pub fn value(&self, x: Point<T>) -> Complex<T> {
        self.value_and_gradient(x).0
    }

    pub fn evaluate(&self, points: &[Point<T>]) -> Vec<Complex<T>> {
        points.iter().map(|p| self.value(*p)).collect()
    }
}

/// Something that can be sampled on a polar tensor grid, returning values
/// and Cartesian gradients.
pub trait FieldProvider<T: Real> {
    fn sample(&self, grid: &DiskGrid<T>) -> Result<(Vec<Complex<T>>, Vec<[Complex<T>; 2]>), AnalysisError>;
}

fn polar_to_cartesian<T: Real>(grid: &DiskGrid<T>, dr: &[Complex<T>], dt: &[Complex<T>]) -> Vec<[Complex<T>; 2]> {
    (0..grid.len())
        .map(|g| {
            let (r, t) = grid.node(g);
            let (s, c) = t.sin_cos();
            let tang = dt[g] / r;
            [dr[g] * c - tang * s, dr[g] * s + tang * c]
        })
        .collect()
}

impl<T: Real> FieldProvider<T> for SpectralCoefficients<T> {
    fn sample(&self, grid: &DiskGrid<T>) -> Result<(Vec<Complex<T>>, Vec<[Complex<T>; 2]>), AnalysisError> {
        let [v, dr, dt] = self.evaluate_tensor(grid.rho_nodes_pos(), grid.theta_nodes())?;
        let grad = polar_to_cartesian(grid, &dr, &dt);
        Ok((v, grad))
    }
}

impl<T: Real> FieldProvider<T> for ExactSolution<T> {
    fn sample(&self, grid: &DiskGrid<T>) -> Result<(Vec<Complex<T>>, Vec<[Complex<T>; 2]>), AnalysisError> {
        Ok((0..grid.len())
            .map(|g| self.value_and_gradient(grid.cartesian(g)))
            .unzip())
    }
}

/// Pre-sampled values and gradients on a fixed comparison grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T> {
    pub values: Vec<Complex<T>>,
    pub gradients: Vec<[Complex<T>; 2]>,
}

impl<T: Real> FieldProvider<T> for SampledField<T> {
    fn sample(&self, grid: &DiskGrid<T>) -> Result<(Vec<Complex<T>>, Vec<[Complex<T>; 2]>), AnalysisError> {
        if self.values.len() != grid.len() {
            return Err(AnalysisError::Length {
                expected: grid.len(),
                got: self.values.len(),
            });
        }
        Ok((self.values.clone(), self.gradients.clone()))
    }
}

/// Errors of a computed field against a reference over `B_ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport<T> {
    pub l2_abs: T,
    pub h1_abs: T,
    pub linf_abs: T,
    /// `None` when the reference vanishes in the matching norm.
    pub l2_rel: Option<T>,
    pub h1_rel: Option<T>,
    pub linf_rel: Option<T>,
    pub comparison_radius: T,
    pub grid_used: (usize, usize),
}

/// Comparison grid on `B_ρ`.
pub fn comparison_grid<T: Real>(rho: T, m_theta: usize, m_rho: usize) -> Result<DiskGrid<T>, AnalysisError> {
    Ok(build_disk_grid(rho, m_theta, m_rho)?)
}

/// L², H¹ and L∞ norms of `field − reference` on `B_ρ`, discretized by an
/// `(M_θ, M_ρ)` comparison grid with area quadrature. The L∞ norm is the
/// nodal maximum over that grid.
pub fn error_norms<T: Real>(
    field: &SpectralCoefficients<T>,
    reference: &dyn FieldProvider<T>,
    rho: T,
    m_theta: usize,
    m_rho: usize,
) -> Result<ErrorReport<T>, AnalysisError> {
    if !(rho > T::zero()) || rho > field.radius() {
        return Err(AnalysisError::ComparisonRadius {
            rho: rho.to_f64().unwrap_or(f64::NAN),
            radius: field.radius().to_f64().unwrap_or(f64::NAN),
        });
    }
    let grid = comparison_grid(rho, m_theta, m_rho)?;
    let (v, gv) = field.sample(&grid)?;
    let (u, gu) = reference.sample(&grid)?;
    Ok(norms_from_samples(&grid, &v, &gv, &u, &gu))
}

/// Same as [`error_norms`] with both fields already sampled on `grid`.
pub fn norms_from_samples<T: Real>(
    grid: &DiskGrid<T>,
    v: &[Complex<T>],
    gv: &[[Complex<T>; 2]],
    u: &[Complex<T>],
    gu: &[[Complex<T>; 2]],
) -> ErrorReport<T> {
    let w = area_weights(grid);
    let mut e2 = T::zero();
    let mut eg2 = T::zero();
    let mut u2 = T::zero();
    let mut ug2 = T::zero();
    let mut einf = T::zero();
    let mut uinf = T::zero();
    for g in 0..grid.len() {
        let e = v[g] - u[g];
        let de = [gv[g][0] - gu[g][0], gv[g][1] - gu[g][1]];
        e2 += w[g] * e.norm_sqr();
        eg2 += w[g] * (de[0].norm_sqr() + de[1].norm_sqr());
        u2 += w[g] * u[g].norm_sqr();
        ug2 += w[g] * (gu[g][0].norm_sqr() + gu[g][1].norm_sqr());
        einf = einf.max(e.norm());
        uinf = uinf.max(u[g].norm());
    }
    let rel = |a: T, b: T| if b > T::zero() { Some(a / b) } else { None };
    let l2 = e2.sqrt();
    let h1 = (e2 + eg2).sqrt();
    ErrorReport {
        l2_abs: l2,
        h1_abs: h1,
        linf_abs: einf,
        l2_rel: rel(l2, u2.sqrt()),
        h1_rel: rel(h1, (u2 + ug2).sqrt()),
        linf_rel: rel(einf, uinf),
        comparison_radius: grid.radius(),
        grid_used: (grid.m_theta(), grid.m_rho()),
    }
}

/// Result of a least-squares fit `log e = intercept + slope·log p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual in log space.
    pub rms_residual: T,
}

pub fn fit_rate<T: Real>(samples: &[(T, T)]) -> Result<RateFit<T>, AnalysisError> {
    if samples.len() < 3 {
        return Err(AnalysisError::TooFewSamples(samples.len()));
    }
    if let Some((p, e)) = samples
        .iter()
        .find(|(p, e)| !(*p > T::zero()) || !(*e > T::zero()) || !p.is_finite() || !e.is_finite())
    {
        return Err(AnalysisError::NonPositiveSample(
            p.to_f64().unwrap_or(f64::NAN),
            e.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let n = T::from_usize_lossy(samples.len());
    let xs: Vec<T> = samples.iter().map(|(p, _)| p.ln()).collect();
    let ys: Vec<T> = samples.iter().map(|(_, e)| e.ln()).collect();
    let mx = xs.iter().fold(T::zero(), |a, b| a + *b) / n;
    let my = ys.iter().fold(T::zero(), |a, b| a + *b) / n;
    let (sxy, sxx) = xs
        .iter()
        .zip(&ys)
        .fold((T::zero(), T::zero()), |(a, b), (x, y)| {
            (a + (*x - mx) * (*y - my), b + (*x - mx) * (*x - mx))
        });
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = xs.iter().zip(&ys).fold(T::zero(), |a, (x, y)| {
        let r = *y - intercept - slope * *x;
        a + r * r
    });
    Ok(RateFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::catalog_entry;

    fn cheb(h: usize, x: f64) -> f64 {
        (h as f64 * x.clamp(-1.0, 1.0).acos()).cos()
    }

    #[test]
    fn constant_field_is_single_mode() {
        let g = build_disk_grid(2.0, 7, 9).unwrap();
        let c = to_spectral(&g, &vec![Complex::new(3.0, -1.0); g.len()]).unwrap();
        for m in -3..=3 {
            for h in 0..c.chebyshev_len() {
                let want = if m == 0 && h == 0 { Complex::new(3.0, -1.0) } else { Complex::zero() };
                assert!((c.coefficient(m, h) - want).norm() < 1e-13);
            }
        }
        let v = evaluate_at(&c, &[(0.3, 1.0), (2.0, 5.0), (0.0, 0.0)]).unwrap();
        assert!(v.iter().all(|z| (z - Complex::new(3.0, -1.0)).norm() < 1e-13));
    }

    #[test]
    fn parity_consistent_mode() {
        // T₃(ρ/R)cos 3θ is smooth on the disk (odd in ρ, odd mode)
        let g = build_disk_grid(1.5, 9, 8).unwrap();
        let vals = g.sample_polar(|r, t| Complex::new(cheb(3, r / 1.5) * (3.0 * t).cos(), 0.0));
        let c = to_spectral(&g, &vals).unwrap();
        for m in -4i64..=4 {
            for h in 0..c.chebyshev_len() {
                let want = if m.abs() == 3 && h == 3 { 0.5 } else { 0.0 };
                assert!((c.coefficient(m, h) - want).norm() < 1e-13, "{m} {h}");
            }
        }
    }

    #[test]
    fn round_trip_and_off_grid() {
        let g = build_disk_grid(1.0, 11, 16).unwrap();
        let vals: Vec<Complex<f64>> = (0..g.len())
            .map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let c = to_spectral(&g, &vals).unwrap();
        let pts: Vec<(f64, f64)> = (0..g.len()).map(|i| g.node(i)).collect();
        let back = evaluate_at(&c, &pts).unwrap();
        for (a, b) in back.iter().zip(&vals) {
            assert!((a - b).norm() < 1e-11);
        }
        let g = build_disk_grid(2.0, 9, 30).unwrap();
        let f = |r: f64, t: f64| (-r * r).exp() * t.cos() * r;
        let vals = g.sample_polar(|r, t| Complex::new(f(r, t), 0.0));
        let c = to_spectral(&g, &vals).unwrap();
        for (r, t) in [(0.05, 0.3), (1.234, 2.0), (1.99, 4.0)] {
            let (v, dr, dt) = c.evaluate_with_derivatives(r, t).unwrap();
            assert!((v.re - f(r, t)).abs() < 1e-10);
            let want_dr = (-r * r).exp() * t.cos() * (1.0 - 2.0 * r * r);
            assert!((dr.re - want_dr).abs() < 1e-8);
            assert!((dt.re + (-r * r).exp() * t.sin() * r).abs() < 1e-10);
        }
        assert!(matches!(
            evaluate_at(&c, &[(2.5, 0.0)]),
            Err(AnalysisError::OutsideDisk { .. })
        ));
    }

    #[test]
    fn exact_solution_zero_and_decay() {
        let (n, zero) = catalog_entry::<f64>("zero").unwrap();
        let u = exact_solution_constant_n(&zero, &n, 1.0).unwrap();
        assert_eq!(u.value([0.3, 0.2]), Complex::zero());
        let (n, f0) = catalog_entry::<f64>("f0").unwrap();
        let u = exact_solution_constant_n(&f0, &n, 1.0).unwrap();
        let ratio = u.value([20.0, 0.0]).norm() / u.value([40.0, 0.0]).norm();
        assert!((ratio - 2f64.sqrt()).abs() < 0.02, "{ratio}");
        let (pvr, s) = catalog_entry::<f64>("PVR1").unwrap();
        assert_eq!(
            exact_solution_constant_n(&s, &pvr, 1.0).unwrap_err(),
            AnalysisError::UnsupportedMedium
        );
    }

    #[test]
    fn rate_fits() {
        let s: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0].iter().map(|r| (*r, 0.7 / r)).collect();
        let f = fit_rate(&s).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        let s: Vec<(f64, f64)> = [1.0, 2.0, 3.0, 5.0].iter().map(|k: &f64| (*k, 2.0 * k.powi(-3))).collect();
        assert!((fit_rate(&s).unwrap().slope + 3.0).abs() < 1e-12);
        assert_eq!(fit_rate(&s[..2]).unwrap_err(), AnalysisError::TooFewSamples(2));
        assert!(matches!(
            fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(AnalysisError::NonPositiveSample(..))
        ));
    }

    #[test]
    fn norms_of_constant_shift() {
        let (n, f0) = catalog_entry::<f64>("f0").unwrap();
        let u = exact_solution_constant_n(&f0, &n, 1.0).unwrap();
        let cg = comparison_grid(1.0, 21, 30).unwrap();
        let (vals, grads) = u.sample(&cg).unwrap();
        let shifted = SampledField {
            values: vals.iter().map(|v| v + Complex::new(0.01, 0.0)).collect(),
            gradients: grads.clone(),
        };
        let r = norms_from_samples(&cg, &shifted.values, &shifted.gradients, &vals, &grads);
        assert!((r.linf_abs - 0.01).abs() < 1e-15);
        assert!((r.l2_abs - 0.01 * std::f64::consts::PI.sqrt()).abs() < 1e-14);
        let same = norms_from_samples(&cg, &vals, &grads, &vals, &grads);
        assert_eq!(same.l2_abs, 0.0);
        assert_eq!(same.h1_rel, Some(0.0));
    }
}
