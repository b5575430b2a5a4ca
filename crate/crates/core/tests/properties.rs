use helmpv::analysis::{evaluate_at, fit_rate, to_spectral};
use helmpv::assembly::{DiscreteSystem, FunctionalForm, MediumField, PolarOperators};
use helmpv::grid::{build_disk_grid, diff_rho, diff_theta, quadrature_weights, AngularFold, FoldKind};
use helmpv::solve::{check_minimality, KktSolver, SolveOptions};
use helmpv::specfun::{bessel_j0, bessel_j1, bessel_y0, bessel_y1};
use helmpv::C64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn odd(lo: usize, hi: usize) -> impl Strategy<Value = usize> {
    (lo / 2..=hi / 2).prop_map(|h| 2 * h + 1)
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_transform_interpolates_nodes(
        (mt, mr, values) in (odd(3, 11), 4usize..12).prop_flat_map(|(mt, mr)| (Just(mt), Just(mr), complex_vec(mt * mr))),
        radius in 0.5..6.0f64,
    ) {
        let grid = build_disk_grid(radius, mt, mr).unwrap();
        let coeffs = to_spectral(&grid, &values).unwrap();
        let pts: Vec<(f64, f64)> = (0..grid.len()).map(|g| grid.node(g)).collect();
        let back = evaluate_at(&coeffs, &pts).unwrap();
        for (a, b) in back.iter().zip(&values) {
            prop_assert!((a - b).norm() < 1e-11, "{} vs {}", a, b);
        }
    }

    #[test]
    fn theta_derivative_exact_on_trig_polynomials(
        mt in odd(3, 31),
        coef in prop::collection::vec(-1.0..1.0f64, 32),
    ) {
        let d = diff_theta::<f64>(mt).unwrap();
        let half = (mt - 1) / 2;
        let th: Vec<f64> = (1..=mt).map(|i| 2.0 * PI * i as f64 / mt as f64).collect();
        let f = |t: f64| (1..=half).map(|m| coef[2 * m - 2] * (m as f64 * t).cos() + coef[2 * m - 1] * (m as f64 * t).sin()).sum::<f64>() + coef[31];
        let df = |t: f64| (1..=half).map(|m| m as f64 * (coef[2 * m - 1] * (m as f64 * t).cos() - coef[2 * m - 2] * (m as f64 * t).sin())).sum::<f64>();
        let v: Vec<f64> = th.iter().map(|t| f(*t)).collect();
        for (got, t) in d.apply_real(&v).iter().zip(&th) {
            prop_assert!((got - df(*t)).abs() < 1e-11 * mt as f64);
        }
    }

    #[test]
    fn rho_derivative_exact_on_polynomials(
        mr in 4usize..16,
        radius in 0.5..3.0f64,
        coef in prop::collection::vec(-1.0..1.0f64, 32),
    ) {
        let grid = build_disk_grid(radius, 3, mr).unwrap();
        let d = diff_rho(&grid);
        let x = grid.rho_nodes_full();
        let deg = 2 * mr - 1;
        // Chebyshev-scaled monomials keep the check well conditioned
        let f = |r: f64| (0..=deg).map(|p| coef[p] * (r / radius).powi(p as i32)).sum::<f64>();
        let df = |r: f64| (1..=deg).map(|p| coef[p] * p as f64 * (r / radius).powi(p as i32 - 1) / radius).sum::<f64>();
        let v: Vec<f64> = x.iter().map(|r| f(*r)).collect();
        let scale: f64 = (1..=deg).map(|p| (p * p) as f64).sum::<f64>() / radius;
        for (got, r) in d.apply_real(&v).iter().zip(x) {
            prop_assert!((got - df(*r)).abs() < 1e-13 * scale, "{} vs {}", got, df(*r));
        }
    }

    #[test]
    fn quadrature_exact_on_even_powers(
        mr in 6usize..16,
        radius in 0.5..2.0f64,
        p_frac in 0.0..1.0f64,
    ) {
        let grid = build_disk_grid(radius, 3, mr).unwrap();
        let w = quadrature_weights(&grid);
        let p = ((mr - 1) as f64 * p_frac) as i32;
        let got: f64 = (0..grid.len()).map(|g| w[g] * grid.node(g).0.powi(2 * p)).sum();
        // ∫₀^R ρ^{n}/(1+ρ) dρ with n = 2p + 1, by polynomial division
        let n = 2 * p + 1;
        let poly: f64 = (0..n).map(|i| (-1f64).powi(n - 1 - i) * radius.powi(i + 1) / (i + 1) as f64).sum();
        let want = 2.0 * PI * (poly + (-1f64).powi(n) * radius.ln_1p());
        prop_assert!((got - want).abs() < 1e-11 * want.abs().max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn bessel_wronskian(x in 1e-3..200.0f64) {
        let w = bessel_j1(x).unwrap() * bessel_y0(x).unwrap() - bessel_j0(x).unwrap() * bessel_y1(x).unwrap();
        let want = 2.0 / (PI * x);
        prop_assert!((w - want).abs() <= 1e-12 * want.max(1.0), "{} vs {}", w, want);
    }

    #[test]
    fn spectral_fold_is_half_turn(
        mt in odd(3, 25),
        coef in prop::collection::vec(-1.0..1.0f64, 26),
    ) {
        let fold = AngularFold::<f64>::new(FoldKind::Spectral, mt).unwrap();
        let half = (mt - 1) / 2;
        let f = |t: f64| (1..=half).map(|m| coef[2 * m - 2] * (m as f64 * t).cos() + coef[2 * m - 1] * (m as f64 * t).sin()).sum::<f64>() + coef[25];
        let th: Vec<f64> = (1..=mt).map(|i| 2.0 * PI * i as f64 / mt as f64).collect();
        let v: Vec<C64> = th.iter().map(|t| C64::new(f(*t), 0.0)).collect();
        let mut out = vec![C64::new(0.0, 0.0); mt];
        fold.apply(&v, 1, &mut out);
        for (o, t) in out.iter().zip(&th) {
            prop_assert!((o.re - f(t + PI)).abs() < 1e-12 * mt as f64);
        }
        let mut twice = vec![C64::new(0.0, 0.0); mt];
        fold.apply(&out, 1, &mut twice);
        for (a, b) in twice.iter().zip(&v) {
            prop_assert!((a - b).norm() < 1e-12 * mt as f64);
        }
    }

    #[test]
    fn functional_hessian_is_hermitian_psd(
        mt in odd(3, 7),
        mr in 4usize..8,
        k in 0.25..4.0f64,
        literal in any::<bool>(),
        seed in complex_vec(64),
    ) {
        let grid = build_disk_grid(3.0, mt, mr).unwrap();
        let ops = Arc::new(PolarOperators::new(&grid, FoldKind::Spectral).unwrap());
        let medium = MediumField::constant(&grid, 1.0).unwrap();
        let form = if literal { FunctionalForm::Literal } else { FunctionalForm::Polar };
        let rhs = vec![C64::new(0.0, 0.0); grid.interior_len()];
        let sys = DiscreteSystem::new(ops, medium, k, rhs, form).unwrap();
        let h = sys.functional().to_dense();
        let n = h.rows();
        let norm: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| h[(i, j)].norm()).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((h[(i, j)] - h[(j, i)].conj()).norm() <= 1e-12 * norm);
            }
        }
        let v: Vec<C64> = (0..n).map(|i| seed[i % seed.len()] * (1.0 + i as f64).sqrt()).collect();
        let e = sys.functional().energy(&v);
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!(e >= -1e-12 * norm * vv * n as f64);
    }

    #[test]
    fn computed_field_minimizes_functional(
        mt in odd(3, 9),
        mr in 5usize..10,
        k in 0.5..3.0f64,
        seed in any::<u64>(),
    ) {
        let grid = build_disk_grid(2.5, mt, mr).unwrap();
        let ops = Arc::new(PolarOperators::new(&grid, FoldKind::Spectral).unwrap());
        let medium = MediumField::from_refraction(&grid, &helmpv::problems::RefractionKind::AngularPlusBump).unwrap();
        let rhs: Vec<C64> = (0..grid.interior_len()).map(|i| C64::new((i as f64).sin(), 0.0)).collect();
        let sys = DiscreteSystem::new(ops, medium, k, rhs, FunctionalForm::Polar).unwrap();
        let solver = KktSolver::new(&sys).unwrap();
        let opts = SolveOptions::default();
        let sol = solver.solve(&opts, None).unwrap();
        let rep = check_minimality(&solver, &sol, 3, seed, &opts).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
    }

    #[test]
    fn rate_fit_recovers_power_laws(
        slope in -4.0..2.0f64,
        scale in 1e-3..1e3f64,
        start in 0.1..10.0f64,
        count in 3usize..8,
    ) {
        let samples: Vec<(f64, f64)> = (0..count).map(|i| {
            let p = start * 2f64.powi(i as i32);
            (p, scale * p.powf(slope))
        }).collect();
        let fit = fit_rate(&samples).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-12, "{} vs {}", fit.slope, slope);
        prop_assert!(fit.rms_residual < 1e-12);
    }
}
