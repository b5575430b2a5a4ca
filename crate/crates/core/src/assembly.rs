//! Discrete Helmholtz constraint `Ã`, radiation functional `H̃ = H†𝒲H`,
//! and the KKT system that couples them.
//!
//! All operators are matrix-free: they act on fields stored in canonical
//! node order (`j + M_ρ·i`). The constraint drops the `M_θ` boundary rows
//! (`j = 0`); its output is indexed by `(j−1) + (M_ρ−1)·i`.

use crate::grid::{
    angular_apply, diff_rho, diff_theta, diff_theta2, quadrature_weights, split_fold_blocks,
    AngularFold, DiskGrid, FoldKind, GridError,
};
use crate::linalg::Mat;
use crate::problems::{ProblemSpec, RefractionKind};
use crate::scalar::Real;
use num_complex::Complex;
use num_traits::Zero;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("n(x)^2 must be positive and finite; got {value} at node {node}")]
    Refraction { node: usize, value: f64 },
    #[error("wavenumber must be positive, got {0}")]
    Wavenumber(f64),
    #[error("vector length {got} does not match expected {expected}")]
    Length { expected: usize, got: usize },
}

/// How the radiation functional measures the outgoing condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FunctionalForm {
    /// `|∂_ρv − ikn v|² + |ρ⁻¹∂_θv|²`: the radial Sommerfeld defect plus the
    /// tangential gradient, both on the polar grid.
    #[default]
    Polar,
    /// `|∂_ρv − ikn cosθ v|² + |ρ⁻¹∂_θv − ikn sinθ v|²`, a literal transcription
    /// that mixes polar derivatives with Cartesian components of `x̂`.
    Literal,
}

/// How the source is turned into the right-hand side `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceSampling {
    /// `φ = f` at the nodes.
    #[default]
    Pointwise,
    /// Mean of `f` over each node's polar cell (midpoints between
    /// neighbouring nodes), by a `n × n` midpoint rule. Removes the
    /// node-placement sensitivity of discontinuous sources.
    CellAverage(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AssemblyOptions {
    pub fold: FoldKind,
    pub form: FunctionalForm,
    pub source: SourceSampling,
}

/// Grid-level building blocks shared by every operator on the same grid.
#[derive(Debug, Clone)]
pub struct PolarOperators<T: Real> {
    grid: DiskGrid<T>,
    fold: AngularFold<T>,
    d1: Mat<T>,
    d2: Mat<T>,
    /// `D^rr + diag(1/ρ)·D^r`, split like `d1`/`d2`.
    l1: Mat<T>,
    l2: Mat<T>,
    dtheta: Mat<T>,
    dtheta2: Mat<T>,
    inv_rho: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> PolarOperators<T> {
    pub fn new(grid: &DiskGrid<T>, fold: FoldKind) -> Result<Self, AssemblyError> {
        let m_rho = grid.m_rho();
        let d = diff_rho(grid);
        let dd = crate::grid::DiffMatrix {
            kind: crate::grid::DiffKind::RhoSecond,
            matrix: d.matrix.matmul(&d.matrix),
        };
        let (d1, d2) = split_fold_blocks(&d)?;
        let (dd1, dd2) = split_fold_blocks(&dd)?;
        let inv_rho: Vec<T> = grid.rho_nodes_pos().iter().map(|r| T::one() / *r).collect();
        let l1 = Mat::from_fn(m_rho, m_rho, |j, l| dd1[(j, l)] + inv_rho[j] * d1[(j, l)]);
        let l2 = Mat::from_fn(m_rho, m_rho, |j, l| dd2[(j, l)] + inv_rho[j] * d2[(j, l)]);
        Ok(Self {
            fold: AngularFold::new(fold, grid.m_theta())?,
            dtheta: diff_theta(grid.m_theta())?.matrix,
            dtheta2: diff_theta2(grid.m_theta())?.matrix,
            weights: quadrature_weights(grid),
            grid: grid.clone(),
            d1,
            d2,
            l1,
            l2,
            inv_rho,
        })
    }

    pub fn grid(&self) -> &DiskGrid<T> {
        &self.grid
    }

    pub fn fold(&self) -> &AngularFold<T> {
        &self.fold
    }

    /// Positive-half blocks of the first radial derivative.
    pub fn radial_first(&self) -> (&Mat<T>, &Mat<T>) {
        (&self.d1, &self.d2)
    }

    /// Positive-half blocks of the radial Laplacian part `∂ρρ + ρ⁻¹∂ρ`.
    pub fn radial_laplacian(&self) -> (&Mat<T>, &Mat<T>) {
        (&self.l1, &self.l2)
    }

    pub fn inv_rho(&self) -> &[T] {
        &self.inv_rho
    }

    /// Functional weights `𝒲` (one per node, canonical order).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `y_i = A·x_i` (or `Aᵀ`) for every angular column.
    fn radial(&self, a: &Mat<T>, transpose: bool, x: &[Complex<T>], y: &mut [Complex<T>]) {
        let m = self.grid.m_rho();
        for (xc, yc) in x.chunks_exact(m).zip(y.chunks_exact_mut(m)) {
            if transpose {
                yc.iter_mut().for_each(|e| *e = Complex::zero());
                for (j, xj) in xc.iter().enumerate() {
                    if xj.is_zero() {
                        continue;
                    }
                    for (e, &a) in yc.iter_mut().zip(a.row(j)) {
                        *e += xj * a;
                    }
                }
            } else {
                a.apply(xc, yc);
            }
        }
    }

    /// `D₁v + D₂(Pv)` on every column, i.e. `∂_ρ v` at the positive nodes.
    pub fn d_rho(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        self.folded(&self.d1, &self.d2, v)
    }

    /// Adjoint of [`Self::d_rho`]: `D₁ᵀy + Pᵀ(D₂ᵀy)`.
    pub fn d_rho_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.folded_adjoint(&self.d1, &self.d2, y)
    }

    fn folded(&self, a1: &Mat<T>, a2: &Mat<T>, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.grid.m_rho();
        let mut pv = vec![Complex::zero(); v.len()];
        self.fold.apply(v, m, &mut pv);
        let mut out = vec![Complex::zero(); v.len()];
        let mut tmp = vec![Complex::zero(); v.len()];
        self.radial(a1, false, v, &mut out);
        self.radial(a2, false, &pv, &mut tmp);
        out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
        out
    }

    fn folded_adjoint(&self, a1: &Mat<T>, a2: &Mat<T>, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.grid.m_rho();
        let mut out = vec![Complex::zero(); y.len()];
        let mut tmp = vec![Complex::zero(); y.len()];
        let mut ptmp = vec![Complex::zero(); y.len()];
        self.radial(a1, true, y, &mut out);
        self.radial(a2, true, y, &mut tmp);
        self.fold.apply_transpose(&tmp, m, &mut ptmp);
        out.iter_mut().zip(&ptmp).for_each(|(o, t)| *o += t);
        out
    }

    fn angular(&self, a: &Mat<T>, transpose: bool, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); v.len()];
        angular_apply(a, transpose, v, self.grid.m_rho(), &mut out);
        out
    }
}

/// Nodal values of `n` and `n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumField<T> {
    n: Vec<T>,
    n_sq: Vec<T>,
    m_rho: usize,
}

impl<T: Real> MediumField<T> {
    pub fn from_refraction(grid: &DiskGrid<T>, kind: &RefractionKind<T>) -> Result<Self, AssemblyError> {
        Self::from_squares(grid, grid.sample(|x| kind.n_squared(x)))
    }

    pub fn constant(grid: &DiskGrid<T>, n: T) -> Result<Self, AssemblyError> {
        Self::from_squares(grid, vec![n * n; grid.len()])
    }

    /// Medium from nodal values of `n²`.
    pub fn from_squares(grid: &DiskGrid<T>, n_sq: Vec<T>) -> Result<Self, AssemblyError> {
        if n_sq.len() != grid.len() {
            return Err(AssemblyError::Length {
                expected: grid.len(),
                got: n_sq.len(),
            });
        }
        if let Some((node, v)) = n_sq
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > T::zero()) || !v.is_finite())
        {
            return Err(AssemblyError::Refraction {
                node,
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            n: n_sq.iter().map(|v| v.sqrt()).collect(),
            n_sq,
            m_rho: grid.m_rho(),
        })
    }

    pub fn n(&self) -> &[T] {
        &self.n
    }

    pub fn n_squared(&self) -> &[T] {
        &self.n_sq
    }

    fn angular_mean(&self, v: &[T]) -> Vec<T> {
        let m_theta = v.len() / self.m_rho;
        let scale = T::one() / T::from_usize_lossy(m_theta);
        (0..self.m_rho)
            .map(|j| (0..m_theta).fold(T::zero(), |s, i| s + v[j + self.m_rho * i]) * scale)
            .collect()
    }

    /// Angular mean of `n` on each radial node.
    pub fn mean_n(&self) -> Vec<T> {
        self.angular_mean(&self.n)
    }

    /// Angular mean of `n²` on each radial node.
    pub fn mean_n_squared(&self) -> Vec<T> {
        self.angular_mean(&self.n_sq)
    }

    /// True when `n` does not vary with `θ` at any radius.
    pub fn is_radial(&self) -> bool {
        let m_theta = self.n_sq.len() / self.m_rho;
        (0..self.m_rho).all(|j| (1..m_theta).all(|i| self.n_sq[j + self.m_rho * i] == self.n_sq[j]))
    }
}

/// Source samples `φ` at the interior nodes (`j ≥ 1`).
pub fn assemble_source<T: Real>(
    grid: &DiskGrid<T>,
    mut f: impl FnMut([T; 2]) -> Complex<T>,
) -> Vec<Complex<T>> {
    let m = grid.m_rho();
    let mut out = Vec::with_capacity(grid.interior_len());
    for i in 0..grid.m_theta() {
        for j in 1..m {
            out.push(f(grid.cartesian(grid.index(j, i))));
        }
    }
    out
}

/// Cell means of `f` at the interior nodes; see [`SourceSampling::CellAverage`].
pub fn assemble_source_averaged<T: Real>(
    grid: &DiskGrid<T>,
    sub: usize,
    mut f: impl FnMut([T; 2]) -> Complex<T>,
) -> Vec<Complex<T>> {
    let m = grid.m_rho();
    let sub = sub.max(1);
    let rho = grid.rho_nodes_pos();
    let half = T::lit(0.5);
    let dth = T::lit(2.0) * T::PI() / T::from_usize_lossy(grid.m_theta());
    let frac = |a: usize| (T::from_usize_lossy(a) + half) / T::from_usize_lossy(sub);
    let mut out = Vec::with_capacity(grid.interior_len());
    for i in 0..grid.m_theta() {
        let theta = grid.theta_nodes()[i];
        for j in 1..m {
            let hi = half * (rho[j] + rho[j - 1]);
            let lo = if j + 1 < m { half * (rho[j] + rho[j + 1]) } else { T::zero() };
            let mut acc = Complex::zero();
            let mut wsum = T::zero();
            for a in 0..sub {
                let r = lo + (hi - lo) * frac(a);
                for b in 0..sub {
                    let t = theta + dth * (frac(b) - half);
                    acc += f([r * t.cos(), r * t.sin()]) * r;
                    wsum += r;
                }
            }
            out.push(acc / wsum);
        }
    }
    out
}

/// The collocated Helmholtz operator `Ã`, boundary rows removed.
#[derive(Debug, Clone)]
pub struct ConstraintOperator<T: Real> {
    ops: Arc<PolarOperators<T>>,
    k2n2: Vec<T>,
}

/// Builds `Ã` for `Δu + k²n²u` on the grid of `ops`.
pub fn assemble_constraint<T: Real>(
    ops: &Arc<PolarOperators<T>>,
    medium: &MediumField<T>,
    k: T,
) -> Result<ConstraintOperator<T>, AssemblyError> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(AssemblyError::Wavenumber(k.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(build_constraint(ops, medium, k))
}

pub(crate) fn build_constraint<T: Real>(
    ops: &Arc<PolarOperators<T>>,
    medium: &MediumField<T>,
    k: T,
) -> ConstraintOperator<T> {
    ConstraintOperator {
        ops: ops.clone(),
        k2n2: medium.n_sq.iter().map(|n2| k * k * *n2).collect(),
    }
}

impl<T: Real> ConstraintOperator<T> {
    pub fn rows(&self) -> usize {
        self.ops.grid.interior_len()
    }

    pub fn cols(&self) -> usize {
        self.ops.grid.len()
    }

    /// `Ãv`.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let ops = &*self.ops;
        let m = ops.grid.m_rho();
        let lap = ops.folded(&ops.l1, &ops.l2, v);
        let ang = ops.angular(&ops.dtheta2, false, v);
        let mut out = Vec::with_capacity(self.rows());
        for i in 0..ops.grid.m_theta() {
            for j in 1..m {
                let g = j + m * i;
                let ir = ops.inv_rho[j];
                out.push(lap[g] + ang[g] * (ir * ir) + v[g] * self.k2n2[g]);
            }
        }
        out
    }

    /// `Ã†μ` (`Ã` is real, so this is `Ãᵀμ`).
    pub fn apply_adjoint(&self, mu: &[Complex<T>]) -> Vec<Complex<T>> {
        let ops = &*self.ops;
        let u = self.expand(mu);
        let mut out = ops.folded_adjoint(&ops.l1, &ops.l2, &u);
        let scaled: Vec<Complex<T>> = u
            .iter()
            .enumerate()
            .map(|(g, x)| {
                let ir = ops.inv_rho[g % ops.grid.m_rho()];
                x * (ir * ir)
            })
            .collect();
        let ang = ops.angular(&ops.dtheta2, true, &scaled);
        for (g, o) in out.iter_mut().enumerate() {
            *o += ang[g] + u[g] * self.k2n2[g];
        }
        out
    }

    /// Interior vector → full vector with zeros on the boundary rows.
    fn expand(&self, mu: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.ops.grid.m_rho();
        let mut u = vec![Complex::zero(); self.cols()];
        for (i, chunk) in mu.chunks_exact(m - 1).enumerate() {
            u[m * i + 1..m * (i + 1)].copy_from_slice(chunk);
        }
        u
    }

    /// Upper bound on `‖Ã‖_∞` from the triangle inequality.
    pub fn norm_inf_bound(&self) -> T {
        let ops = &*self.ops;
        let m = ops.grid.m_rho();
        let row_abs = |a: &Mat<T>, r: usize| a.row(r).iter().fold(T::zero(), |s, x| s + x.abs());
        let p_norm = (0..ops.grid.m_theta())
            .map(|i| row_abs(ops.fold.matrix(), i))
            .fold(T::zero(), T::max);
        let mut best = T::zero();
        for i in 0..ops.grid.m_theta() {
            let ang = row_abs(&ops.dtheta2, i);
            for j in 1..m {
                let ir = ops.inv_rho[j];
                let s = row_abs(&ops.l1, j)
                    + row_abs(&ops.l2, j) * p_norm
                    + ang * ir * ir
                    + self.k2n2[j + m * i].abs();
                best = best.max(s);
            }
        }
        best
    }

    /// Dense copy, built column by column. Intended for small grids.
    pub fn to_dense(&self) -> Mat<Complex<T>> {
        dense_from(self.rows(), self.cols(), |x| self.apply(x))
    }
}

fn dense_from<T: Real>(
    rows: usize,
    cols: usize,
    f: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
) -> Mat<Complex<T>> {
    let mut out = Mat::zeros(rows, cols);
    let mut e = vec![Complex::zero(); cols];
    for c in 0..cols {
        e[c] = Complex::new(T::one(), T::zero());
        for (r, v) in f(&e).into_iter().enumerate() {
            out[(r, c)] = v;
        }
        e[c] = Complex::zero();
    }
    out
}

/// The radiation functional `J[v] = ‖Hv‖²_𝒲` and its Hessian `H̃ = H†𝒲H`.
#[derive(Debug, Clone)]
pub struct FunctionalOperator<T: Real> {
    ops: Arc<PolarOperators<T>>,
    form: FunctionalForm,
    /// `k·n` at every node.
    kn: Vec<T>,
}

pub fn assemble_functional<T: Real>(
    ops: &Arc<PolarOperators<T>>,
    medium: &MediumField<T>,
    k: T,
    form: FunctionalForm,
) -> Result<FunctionalOperator<T>, AssemblyError> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(AssemblyError::Wavenumber(k.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(FunctionalOperator {
        ops: ops.clone(),
        form,
        kn: medium.n.iter().map(|n| k * *n).collect(),
    })
}

impl<T: Real> FunctionalOperator<T> {
    pub fn form(&self) -> FunctionalForm {
        self.form
    }

    pub fn len(&self) -> usize {
        self.kn.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kn.is_empty()
    }

    /// Coefficients `(c₁, c₂)` of `−ikn v` in the two rows at node `g`.
    #[inline]
    fn coupling(&self, g: usize) -> (T, T) {
        match self.form {
            FunctionalForm::Polar => (T::one(), T::zero()),
            FunctionalForm::Literal => {
                let t = self.ops.grid.theta_nodes()[g / self.ops.grid.m_rho()];
                (t.cos(), t.sin())
            }
        }
    }

    /// `Hv`, stacked as `[row₁; row₂]` (length `2N`).
    pub fn factor(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let ops = &*self.ops;
        let m = ops.grid.m_rho();
        let n = v.len();
        let dr = ops.d_rho(v);
        let dt = ops.angular(&ops.dtheta, false, v);
        let mut out = vec![Complex::zero(); 2 * n];
        for g in 0..n {
            let (c1, c2) = self.coupling(g);
            let ikv = v[g] * Complex::new(T::zero(), self.kn[g]);
            out[g] = dr[g] - ikv * c1;
            out[n + g] = dt[g] * ops.inv_rho[g % m] - ikv * c2;
        }
        out
    }

    /// `H†y` for `y = [y₁; y₂]`.
    pub fn factor_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let ops = &*self.ops;
        let m = ops.grid.m_rho();
        let n = y.len() / 2;
        let (y1, y2) = y.split_at(n);
        let mut out = ops.d_rho_adjoint(y1);
        let scaled: Vec<Complex<T>> = y2
            .iter()
            .enumerate()
            .map(|(g, x)| x * ops.inv_rho[g % m])
            .collect();
        let ang = ops.angular(&ops.dtheta, true, &scaled);
        for g in 0..n {
            let (c1, c2) = self.coupling(g);
            let ik = Complex::new(T::zero(), self.kn[g]);
            out[g] += ang[g] + ik * (y1[g] * c1 + y2[g] * c2);
        }
        out
    }

    /// `H̃v = H†𝒲Hv`.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = self.factor(v);
        let n = v.len();
        let w = &self.ops.weights;
        for (g, e) in y.iter_mut().enumerate() {
            *e = *e * w[g % n];
        }
        self.factor_adjoint(&y)
    }

    /// `v†H̃v = Σ 𝒲|Hv|²`, the quadrature value of the radiation functional.
    pub fn energy(&self, v: &[Complex<T>]) -> T {
        let y = self.factor(v);
        let n = v.len();
        let w = &self.ops.weights;
        y.iter()
            .enumerate()
            .fold(T::zero(), |s, (g, e)| s + w[g % n] * e.norm_sqr())
    }

    pub fn to_dense(&self) -> Mat<Complex<T>> {
        dense_from(self.len(), self.len(), |x| self.apply(x))
    }
}

/// Everything needed to solve one discrete problem.
#[derive(Debug, Clone)]
pub struct DiscreteSystem<T: Real> {
    ops: Arc<PolarOperators<T>>,
    medium: MediumField<T>,
    constraint: ConstraintOperator<T>,
    functional: FunctionalOperator<T>,
    rhs: Vec<Complex<T>>,
    k: T,
    options: AssemblyOptions,
}

impl<T: Real> DiscreteSystem<T> {
    pub fn new(
        ops: Arc<PolarOperators<T>>,
        medium: MediumField<T>,
        k: T,
        rhs: Vec<Complex<T>>,
        form: FunctionalForm,
    ) -> Result<Self, AssemblyError> {
        if rhs.len() != ops.grid.interior_len() {
            return Err(AssemblyError::Length {
                expected: ops.grid.interior_len(),
                got: rhs.len(),
            });
        }
        if medium.n_sq.len() != ops.grid.len() {
            return Err(AssemblyError::Length {
                expected: ops.grid.len(),
                got: medium.n_sq.len(),
            });
        }
        let constraint = assemble_constraint(&ops, &medium, k)?;
        let functional = assemble_functional(&ops, &medium, k, form)?;
        let options = AssemblyOptions {
            fold: ops.fold.kind(),
            form,
            source: SourceSampling::Pointwise,
        };
        Ok(Self {
            ops,
            medium,
            constraint,
            functional,
            rhs,
            k,
            options,
        })
    }

    /// Assembles a catalog or custom problem on its own grid.
    pub fn from_problem(p: &ProblemSpec<T>, options: AssemblyOptions) -> Result<Self, AssemblyError> {
        let grid = crate::grid::build_disk_grid(p.radius, p.m_theta, p.m_rho)?;
        let ops = Arc::new(PolarOperators::new(&grid, options.fold)?);
        let medium = MediumField::from_refraction(&grid, &p.refraction)?;
        let rhs = match options.source {
            SourceSampling::Pointwise => assemble_source(&grid, |x| p.source_at(x)),
            SourceSampling::CellAverage(n) => assemble_source_averaged(&grid, n, |x| p.source_at(x)),
        };
        let mut system = Self::new(ops, medium, p.k, rhs, options.form)?;
        system.options.source = options.source;
        Ok(system)
    }

    pub fn grid(&self) -> &DiskGrid<T> {
        &self.ops.grid
    }

    pub fn operators(&self) -> &Arc<PolarOperators<T>> {
        &self.ops
    }

    pub fn medium(&self) -> &MediumField<T> {
        &self.medium
    }

    pub fn constraint(&self) -> &ConstraintOperator<T> {
        &self.constraint
    }

    pub fn functional(&self) -> &FunctionalOperator<T> {
        &self.functional
    }

    pub fn rhs(&self) -> &[Complex<T>] {
        &self.rhs
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn options(&self) -> AssemblyOptions {
        self.options
    }

    /// KKT operator `[[Ã, 0], [H̃, Ã†]]` acting on `[v; λ]`.
    pub fn kkt(&self) -> KktSystem<'_, T> {
        KktSystem { system: self }
    }
}

/// First-order optimality system of `min ½v†H̃v` subject to `Ãv = φ`:
///
/// ```text
/// [ Ã   0  ] [v]   [φ]
/// [ H̃   Ã† ] [λ] = [0]
/// ```
#[derive(Debug, Clone, Copy)]
pub struct KktSystem<'a, T: Real> {
    system: &'a DiscreteSystem<T>,
}

pub fn assemble_kkt<T: Real>(system: &DiscreteSystem<T>) -> KktSystem<'_, T> {
    system.kkt()
}

impl<'a, T: Real> KktSystem<'a, T> {
    pub fn system(&self) -> &'a DiscreteSystem<T> {
        self.system
    }

    /// Number of primal unknowns `N = M_ρM_θ`.
    pub fn n_primal(&self) -> usize {
        self.system.constraint.cols()
    }

    /// Number of multipliers `(M_ρ−1)M_θ`.
    pub fn n_dual(&self) -> usize {
        self.system.constraint.rows()
    }

    pub fn dim(&self) -> usize {
        self.n_primal() + self.n_dual()
    }

    /// Output is ordered like the right-hand side: constraint rows first.
    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let (v, lam) = x.split_at(self.n_primal());
        let mut out = self.system.constraint.apply(v);
        let mut second = self.system.functional.apply(v);
        for (s, a) in second.iter_mut().zip(self.system.constraint.apply_adjoint(lam)) {
            *s += a;
        }
        out.extend(second);
        out
    }

    /// `[φ; 0]`.
    pub fn rhs(&self) -> Vec<Complex<T>> {
        let mut b = self.system.rhs.clone();
        b.resize(self.dim(), Complex::zero());
        b
    }

    pub fn to_dense(&self) -> Mat<Complex<T>> {
        dense_from(self.dim(), self.dim(), |x| self.apply(x))
    }
}
