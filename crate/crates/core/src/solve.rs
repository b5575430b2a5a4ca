//! Iterative solution of the KKT system: restarted GMRES, left-preconditioned
//! by the exact modal solve of the angularly averaged problem.

use crate::assembly::{DiscreteSystem, KktSystem};
use crate::grid::DiskGrid;
use crate::modal::ModalKkt;
use crate::scalar::{dot, norm2, Real};
use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<T> {
    /// Target for the preconditioned relative residual.
    pub tolerance: T,
    /// Cap on the total number of Krylov steps.
    pub max_iterations: usize,
    /// Krylov subspace size between restarts.
    pub restart: usize,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-10),
            max_iterations: 500,
            restart: 60,
        }
    }
}

/// Convergence history and quality measures of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats<T> {
    pub iterations: usize,
    pub restarts: usize,
    /// `‖M⁻¹(b − Kx)‖ / ‖M⁻¹b‖`.
    pub preconditioned_residual: T,
    /// `‖Ãv − φ‖ / ‖φ‖` (absolute when `φ = 0`).
    pub constraint_residual: T,
    /// `‖H̃v + Ã†λ‖ / ‖H̃v‖` (absolute when `H̃v = 0`).
    pub stationarity_residual: T,
    /// `‖Ãv − φ‖_∞ / (‖Ã‖_∞‖v‖_∞ + ‖φ‖_∞)`.
    pub constraint_backward_error: T,
    pub converged: bool,
}

/// Minimizer `v` on the grid, its multiplier `λ`, and solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField<T: Real> {
    pub grid: DiskGrid<T>,
    /// Nodal values in canonical order.
    pub values: Vec<Complex<T>>,
    /// One multiplier per constraint row.
    pub multipliers: Vec<Complex<T>>,
    /// `½ v†H̃v`.
    pub functional_value: T,
    pub stats: SolveStats<T>,
}

#[derive(Debug, Clone, Error)]
pub enum SolveError<T: Real> {
    #[error(
        "no convergence after {iterations} iterations: preconditioned residual {residual:e}{}",
        if *.stagnated { " (stagnated)" } else { "" }
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        stagnated: bool,
        partial: Box<SolutionField<T>>,
    },
    #[error("Krylov breakdown at iteration {iterations}: {reason}")]
    Breakdown { iterations: usize, reason: String },
    #[error("right-hand side has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
}

/// Called after every Krylov step with `(iteration, residual estimate)`.
pub type Progress<'p, T> = Option<&'p mut dyn FnMut(usize, T)>;

/// A factorized preconditioner bound to one discrete system; reusable for
/// many right-hand sides.
pub struct KktSolver<'a, T: Real> {
    kkt: KktSystem<'a, T>,
    pre: ModalKkt<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresStats<T> {
    pub iterations: usize,
    pub restarts: usize,
    pub residual: T,
    pub converged: bool,
    pub stagnated: bool,
}

impl<'a, T: Real> KktSolver<'a, T> {
    pub fn new(system: &'a DiscreteSystem<T>) -> Result<Self, SolveError<T>> {
        let pre = ModalKkt::new(system);
        if let Some(b) = pre.blocks().find(|b| !(b.null_energy() > T::zero())) {
            return Err(SolveError::Breakdown {
                iterations: 0,
                reason: format!(
                    "mode {} has a homogeneous solution with zero functional value",
                    b.mode()
                ),
            });
        }
        Ok(Self {
            kkt: system.kkt(),
            pre,
        })
    }

    pub fn kkt(&self) -> &KktSystem<'a, T> {
        &self.kkt
    }

    pub fn preconditioner(&self) -> &ModalKkt<T> {
        &self.pre
    }

    /// Solves `K x = b` for an arbitrary right-hand side.
    pub fn solve_rhs(
        &self,
        b: &[Complex<T>],
        opts: &SolveOptions<T>,
        mut progress: Progress<'_, T>,
    ) -> Result<(Vec<Complex<T>>, GmresStats<T>), SolveError<T>> {
        let n = self.kkt.dim();
        if b.len() != n {
            return Err(SolveError::Length {
                expected: n,
                got: b.len(),
            });
        }
        let precond = |x: &[Complex<T>]| self.pre.solve(x);
        let op = |x: &[Complex<T>]| self.kkt.apply(x);
        gmres(op, precond, b, opts, &mut progress)
    }

    /// Solves the optimality system `[Ã 0; H̃ Ã†][v; λ] = [φ; 0]`.
    pub fn solve(
        &self,
        opts: &SolveOptions<T>,
        progress: Progress<'_, T>,
    ) -> Result<SolutionField<T>, SolveError<T>> {
        let b = self.kkt.rhs();
        let (x, st) = self.solve_rhs(&b, opts, progress)?;
        let field = self.field_from(x, &st);
        if st.converged {
            return Ok(field);
        }
        if !st.residual.is_finite() {
            return Err(SolveError::Breakdown {
                iterations: st.iterations,
                reason: "non-finite residual".into(),
            });
        }
        Err(SolveError::NonConvergence {
            iterations: st.iterations,
            residual: st.residual.to_f64().unwrap_or(f64::NAN),
            stagnated: st.stagnated,
            partial: Box::new(field),
        })
    }

    fn field_from(&self, x: Vec<Complex<T>>, st: &GmresStats<T>) -> SolutionField<T> {
        let sys = self.kkt.system();
        let np = self.kkt.n_primal();
        let (v, lam) = x.split_at(np);
        let a = sys.constraint();
        let av = a.apply(v);
        let phi = sys.rhs();
        let r1: Vec<Complex<T>> = av.iter().zip(phi).map(|(x, y)| x - y).collect();
        let hv = sys.functional().apply(v);
        let r2: Vec<Complex<T>> = hv
            .iter()
            .zip(a.apply_adjoint(lam))
            .map(|(x, y)| x + y)
            .collect();
        let rel = |r: T, s: T| if s > T::zero() { r / s } else { r };
        let inf = |x: &[Complex<T>]| x.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        let denom = a.norm_inf_bound() * inf(v) + inf(phi);
        SolutionField {
            grid: sys.grid().clone(),
            functional_value: T::lit(0.5) * dot(v, &hv).re,
            values: v.to_vec(),
            multipliers: lam.to_vec(),
            stats: SolveStats {
                iterations: st.iterations,
                restarts: st.restarts,
                preconditioned_residual: st.residual,
                constraint_residual: rel(norm2(&r1), norm2(phi)),
                stationarity_residual: rel(norm2(&r2), norm2(&hv)),
                constraint_backward_error: rel(inf(&r1), denom),
                converged: st.converged,
            },
        }
    }
}

/// Assembles the preconditioner and solves the KKT system.
pub fn solve_kkt<T: Real>(
    kkt: &KktSystem<'_, T>,
    opts: &SolveOptions<T>,
    progress: Progress<'_, T>,
) -> Result<SolutionField<T>, SolveError<T>> {
    KktSolver::new(kkt.system())?.solve(opts, progress)
}

/// Outcome of probing the computed minimizer along random directions of
/// the constraint null space.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport<T> {
    pub probes: usize,
    /// Smallest `J[v + δ] − J[v]` seen.
    pub min_increase: T,
    /// Largest `‖Ãw‖ / (‖Ã‖_∞‖w‖_∞)` of a probe direction.
    pub max_constraint_leak: T,
    pub holds: bool,
}

/// Perturbs `sol` by `probes` random null-space directions `w` (obtained
/// from the KKT solve with right-hand side `[0; h]`, `h` random) and checks
/// that `J[v + δ] ≥ J[v] − 10⁻¹²·max(1, J[v])` for `‖δ‖ = 10⁻³‖v‖`.
pub fn check_minimality<T: Real>(
    solver: &KktSolver<'_, T>,
    sol: &SolutionField<T>,
    probes: usize,
    seed: u64,
    opts: &SolveOptions<T>,
) -> Result<MinimalityReport<T>, SolveError<T>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let sys = solver.kkt().system();
    let a = sys.constraint();
    let h = sys.functional();
    let np = solver.kkt().n_primal();
    let nd = solver.kkt().n_dual();
    let j0 = h.energy(&sol.values);
    let vnorm = norm2(&sol.values);
    let slack = T::lit(1e-12) * (T::lit(0.5) * j0).max(T::one());
    let inf = |x: &[Complex<T>]| x.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let mut report = MinimalityReport {
        probes,
        min_increase: T::infinity(),
        max_constraint_leak: T::zero(),
        holds: true,
    };
    for _ in 0..probes {
        let mut b = vec![Complex::zero(); nd];
        b.extend((0..np).map(|_| {
            Complex::new(
                T::lit(rng.gen::<f64>() - 0.5),
                T::lit(rng.gen::<f64>() - 0.5),
            )
        }));
        let (x, st) = solver.solve_rhs(&b, opts, None)?;
        if !st.converged {
            return Err(SolveError::NonConvergence {
                iterations: st.iterations,
                residual: st.residual.to_f64().unwrap_or(f64::NAN),
                stagnated: st.stagnated,
                partial: Box::new(sol.clone()),
            });
        }
        let w = &x[..np];
        let wn = norm2(w);
        if wn == T::zero() {
            continue;
        }
        let leak = inf(&a.apply(w)) / (a.norm_inf_bound() * inf(w));
        report.max_constraint_leak = report.max_constraint_leak.max(leak);
        let amp = T::lit(1e-3) * if vnorm > T::zero() { vnorm / wn } else { T::one() / wn };
        let ph = Complex::from_polar(amp, T::lit(rng.gen_range(0.0..std::f64::consts::TAU)));
        let pert: Vec<Complex<T>> = sol.values.iter().zip(w).map(|(v, w)| v + w * ph).collect();
        let dj = T::lit(0.5) * (h.energy(&pert) - j0);
        report.min_increase = report.min_increase.min(dj);
        if dj < -slack {
            report.holds = false;
        }
    }
    Ok(report)
}

fn axpy<T: Real>(y: &mut [Complex<T>], a: Complex<T>, x: &[Complex<T>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Left-preconditioned restarted GMRES from a zero initial guess.
///
/// Convergence is declared on the true preconditioned residual, recomputed
/// at the end of every cycle. A cycle that fails to reduce it by at least
/// 1% ends the iteration as stagnated.
pub fn gmres<T: Real>(
    op: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    precond: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    b: &[Complex<T>],
    opts: &SolveOptions<T>,
    progress: &mut Progress<'_, T>,
) -> Result<(Vec<Complex<T>>, GmresStats<T>), SolveError<T>> {
    let n = b.len();
    let mut x = vec![Complex::zero(); n];
    let pb = precond(b);
    let beta0 = norm2(&pb);
    let mut st = GmresStats {
        iterations: 0,
        restarts: 0,
        residual: T::zero(),
        converged: true,
        stagnated: false,
    };
    if beta0 == T::zero() {
        return Ok((x, st));
    }
    if !beta0.is_finite() {
        return Err(SolveError::Breakdown {
            iterations: 0,
            reason: "preconditioned right-hand side is not finite".into(),
        });
    }
    let restart = opts.restart.max(1);
    let mut r = pb;
    let mut rel = T::one();
    let mut first = true;
    loop {
        st.residual = rel;
        if let Some(p) = progress.as_mut() {
            p(st.iterations, rel);
        }
        if rel <= opts.tolerance {
            st.converged = true;
            return Ok((x, st));
        }
        if st.iterations >= opts.max_iterations {
            st.converged = false;
            return Ok((x, st));
        }
        if !first {
            st.restarts += 1;
        }
        first = false;
        let beta = norm2(&r);
        let mut basis: Vec<Vec<Complex<T>>> = vec![r.iter().map(|e| e / beta).collect()];
        // Hessenberg columns after Givens rotations
        let mut hcols: Vec<Vec<Complex<T>>> = Vec::new();
        let mut rots: Vec<(T, Complex<T>)> = Vec::new();
        let mut g = vec![Complex::new(beta, T::zero())];
        for _ in 0..restart {
            if st.iterations >= opts.max_iterations {
                break;
            }
            let j = basis.len() - 1;
            let mut w = precond(&op(&basis[j]));
            let mut h = vec![Complex::zero(); j + 2];
            // modified Gram–Schmidt, twice
            for _ in 0..2 {
                for (i, vi) in basis.iter().enumerate() {
                    let c = dot(vi, &w);
                    h[i] += c;
                    axpy(&mut w, -c, vi);
                }
            }
            let hn = norm2(&w);
            h[j + 1] = Complex::new(hn, T::zero());
            for (i, (c, s)) in rots.iter().enumerate() {
                let a = h[i];
                let bb = h[i + 1];
                h[i] = a * *c + *s * bb;
                h[i + 1] = -s.conj() * a + bb * *c;
            }
            // new rotation zeroing h[j+1]
            let a = h[j];
            let bb = h[j + 1];
            let denom = a.norm().hypot(bb.norm());
            let (c, s) = if denom == T::zero() {
                (T::one(), Complex::zero())
            } else if a.norm() == T::zero() {
                (T::zero(), bb.conj() / bb.norm())
            } else {
                let c = a.norm() / denom;
                (c, (a / a.norm()) * bb.conj() / denom)
            };
            h[j] = a * c + s * bb;
            h[j + 1] = Complex::zero();
            let gj = g[j];
            g[j] = gj * c;
            g.push(-s.conj() * gj);
            rots.push((c, s));
            hcols.push(h);
            st.iterations += 1;
            let est = g[j + 1].norm() / beta0;
            if let Some(p) = progress.as_mut() {
                p(st.iterations, est);
            }
            if !est.is_finite() {
                return Err(SolveError::Breakdown {
                    iterations: st.iterations,
                    reason: "non-finite Arnoldi coefficients".into(),
                });
            }
            if est <= opts.tolerance * T::lit(0.5) || hn <= T::epsilon() * beta {
                break;
            }
            basis.push(w.iter().map(|e| e / hn).collect());
        }
        // back substitution on the triangular Hessenberg factor
        let kdim = hcols.len();
        let mut y = vec![Complex::zero(); kdim];
        for i in (0..kdim).rev() {
            let mut s = g[i];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                s -= hcols[l][i] * yl;
            }
            if hcols[i][i].norm() == T::zero() {
                return Err(SolveError::Breakdown {
                    iterations: st.iterations,
                    reason: "singular Hessenberg factor".into(),
                });
            }
            y[i] = s / hcols[i][i];
        }
        for (yi, vi) in y.iter().zip(&basis) {
            axpy(&mut x, *yi, vi);
        }
        let kx = op(&x);
        let resid: Vec<Complex<T>> = b.iter().zip(&kx).map(|(a, c)| a - c).collect();
        r = precond(&resid);
        let new_rel = norm2(&r) / beta0;
        if new_rel > opts.tolerance && new_rel > rel * T::lit(0.99) {
            st.residual = new_rel;
            st.converged = false;
            st.stagnated = true;
            return Ok((x, st));
        }
        rel = new_rel;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_source, FunctionalForm, MediumField, PolarOperators};
    use crate::grid::{build_disk_grid, FoldKind};
    use crate::problems::RefractionKind;
    use std::sync::Arc;

    fn system(
        mt: usize,
        mr: usize,
        kind: RefractionKind<f64>,
        fold: FoldKind,
    ) -> DiscreteSystem<f64> {
        let g = build_disk_grid(2.0, mt, mr).unwrap();
        let ops = Arc::new(PolarOperators::new(&g, fold).unwrap());
        let medium = MediumField::from_refraction(&g, &kind).unwrap();
        let rhs = assemble_source(&g, |x| {
            Complex::new((-3.0 * (x[0] * x[0] + x[1] * x[1])).exp(), 0.2 * x[0])
        });
        DiscreteSystem::new(ops, medium, 1.5, rhs, FunctionalForm::Polar).unwrap()
    }

    #[test]
    fn modal_is_exact_for_radial_media() {
        for fold in [FoldKind::Spectral, FoldKind::IndexShift] {
            let sys = system(7, 8, RefractionKind::Constant(1.0), fold);
            let solver = KktSolver::new(&sys).unwrap();
            assert!(solver.preconditioner().is_exact());
            let b = solver.kkt().rhs();
            let x = solver.preconditioner().solve(&b);
            let kx = solver.kkt().apply(&x);
            let err: Vec<_> = kx.iter().zip(&b).map(|(a, c)| a - c).collect();
            assert!(norm2(&err) < 1e-9 * norm2(&b), "{}", norm2(&err) / norm2(&b));
        }
    }

    #[test]
    fn gmres_converges_for_variable_media() {
        let sys = system(9, 10, RefractionKind::AngularPlusBump, FoldKind::Spectral);
        let solver = KktSolver::new(&sys).unwrap();
        assert!(!solver.preconditioner().is_exact());
        let mut log = Vec::new();
        let mut sink = |i: usize, r: f64| log.push((i, r));
        let sol = solver.solve(&SolveOptions::default(), Some(&mut sink)).unwrap();
        assert!(sol.stats.converged);
        assert!(sol.stats.preconditioned_residual <= 1e-10);
        assert!(sol.stats.constraint_backward_error <= 1e-10);
        assert!(sol.functional_value > 0.0);
        assert!(!log.is_empty());
    }

    #[test]
    fn minimizer_is_minimal() {
        for kind in [RefractionKind::Constant(1.0), RefractionKind::AngularPlusBump] {
            let sys = system(7, 9, kind, FoldKind::Spectral);
            let solver = KktSolver::new(&sys).unwrap();
            let opts = SolveOptions::default();
            let sol = solver.solve(&opts, None).unwrap();
            let rep = check_minimality(&solver, &sol, 4, 7, &opts).unwrap();
            assert!(rep.holds, "{rep:?}");
            assert!(rep.min_increase > -1e-12);
            assert!(rep.max_constraint_leak < 1e-10);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = build_disk_grid(1.0, 5, 6).unwrap();
        let ops = Arc::new(PolarOperators::new(&g, FoldKind::Spectral).unwrap());
        let medium = MediumField::constant(&g, 1.0).unwrap();
        let sys = DiscreteSystem::new(
            ops,
            medium,
            1.0,
            vec![Complex::zero(); g.interior_len()],
            FunctionalForm::Polar,
        )
        .unwrap();
        let sol = solve_kkt(&sys.kkt(), &SolveOptions::default(), None).unwrap();
        assert!(sol.values.iter().all(|v| v.is_zero()));
        assert_eq!(sol.stats.iterations, 0);
    }

    #[test]
    fn iteration_cap_reports_partial() {
        let sys = system(9, 10, RefractionKind::AngularPlusBump, FoldKind::Spectral);
        let opts = SolveOptions {
            max_iterations: 1,
            tolerance: 1e-14,
            restart: 1,
        };
        match solve_kkt(&sys.kkt(), &opts, None) {
            Err(SolveError::NonConvergence { iterations, partial, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(partial.values.len(), 90);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
