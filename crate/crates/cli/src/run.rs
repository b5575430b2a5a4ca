//! Commands: single solves, parameter sweeps, boundary traces and the
//! built-in self-test.

use crate::config::{form_name, fold_name, sampling_name, CompareMode, RunConfig};
use crate::manifest::{
    ErrorSummary, Minimality, RegimeFits, Residuals, RunManifest, RunStatus, SlopeFit, SolverSettings,
    SweepManifest, SweepPoint, MANIFEST_SCHEMA, SWEEP_SCHEMA,
};
use crate::output::{self, NormsRow, OutputError};
use helmpv::analysis::{
    error_norms, exact_solution_constant_n, fit_rate, to_spectral, AnalysisError, ErrorReport,
    FieldProvider, SpectralCoefficients,
};
use helmpv::assembly::DiscreteSystem;
use helmpv::problems::{total_field, ProblemError, ProblemSpec, CATALOG};
use helmpv::solve::{check_minimality, KktSolver, SolutionField, SolveError};
use helmpv::C64;
use rayon::prelude::*;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const FIELD_FILE: &str = "field.csv";
pub const TOTAL_FILE: &str = "total.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const NORMS_FILE: &str = "norms.csv";
pub const SWEEP_FILE: &str = "sweep.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Output { path: PathBuf, source: OutputError },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Usage(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn out_err(path: &Path) -> impl FnOnce(OutputError) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

/// Catalog problem with the configured overrides applied.
pub fn problem_for(
    cfg: &RunConfig,
    k: f64,
    radius: Option<f64>,
    m_rho: Option<usize>,
) -> Result<ProblemSpec<f64>, CliError> {
    let (_, _, (r0, mt0, mr0)) = CATALOG
        .iter()
        .find(|(n, _, _)| n.eq_ignore_ascii_case(&cfg.problem))
        .ok_or_else(|| ProblemError::UnknownProblem(cfg.problem.clone()))?;
    let radius = radius.or(cfg.radius).unwrap_or(*r0);
    let m_theta = cfg.m_theta.unwrap_or(*mt0);
    let m_rho = m_rho.or(cfg.m_rho).unwrap_or(*mr0);
    Ok(ProblemSpec::from_catalog(&cfg.problem, k, radius, m_theta, m_rho)?)
}

/// Comparison mode after applying the default (analytic when available).
pub fn effective_compare(cfg: &RunConfig, spec: &ProblemSpec<f64>) -> Result<CompareMode, CliError> {
    match cfg.compare {
        Some(CompareMode::Analytic) if !spec.has_analytic_reference() => Err(CliError::Usage(format!(
            "problem {} has no analytic reference; use --compare self or none",
            spec.name
        ))),
        Some(mode) => Ok(mode),
        None if spec.has_analytic_reference() => Ok(CompareMode::Analytic),
        None => Ok(CompareMode::None),
    }
}

/// Result of one solve, before anything is written to disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub solution: Option<SolutionField<f64>>,
    pub spectral: Option<SpectralCoefficients<f64>>,
    pub problem: ProblemSpec<f64>,
}

fn blank_manifest(spec: &ProblemSpec<f64>, cfg: &RunConfig) -> RunManifest {
    RunManifest {
        schema: MANIFEST_SCHEMA.into(),
        status: RunStatus::Failed,
        message: None,
        problem: spec.name.clone(),
        k: spec.k,
        radius: spec.radius,
        m_theta: spec.m_theta,
        m_rho: spec.m_rho,
        fold: fold_name(cfg.assembly.fold).into(),
        functional: form_name(cfg.assembly.form).into(),
        source_sampling: sampling_name(cfg.assembly.source),
        solver: SolverSettings {
            tolerance: cfg.tolerance,
            max_iterations: cfg.max_iterations,
            restart: cfg.restart,
        },
        wall_time_s: 0.0,
        iterations: None,
        restarts: None,
        residuals: None,
        functional_value: None,
        minimality: None,
        errors: None,
        artifacts: Vec::new(),
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn error_summary(mode: CompareMode, r: &ErrorReport<f64>) -> ErrorSummary {
    ErrorSummary {
        reference: mode,
        rho: r.comparison_radius,
        grid: r.grid_used,
        l2: r.l2_abs,
        l2_rel: r.l2_rel,
        h1: r.h1_abs,
        h1_rel: r.h1_rel,
        linf: r.linf_abs,
        linf_rel: r.linf_rel,
    }
}

/// Finer resolution used as the `self` reference.
pub fn refined(spec: &ProblemSpec<f64>, factor: f64) -> ProblemSpec<f64> {
    let mut p = spec.clone();
    p.m_rho = (spec.m_rho as f64 * factor).ceil() as usize;
    let mt = (spec.m_theta as f64 * factor).ceil() as usize;
    p.m_theta = mt | 1;
    p
}

/// Assembles and solves `spec`, then runs the minimality check and the
/// configured comparison. Never fails: problems end up in the manifest.
pub fn solve_problem(spec: &ProblemSpec<f64>, cfg: &RunConfig, verbose: bool) -> RunOutput {
    let start = Instant::now();
    let mut manifest = blank_manifest(spec, cfg);
    let mut out = RunOutput {
        manifest: manifest.clone(),
        solution: None,
        spectral: None,
        problem: spec.clone(),
    };
    let finish = |mut m: RunManifest, mut out: RunOutput, msg: Option<String>| {
        if msg.is_some() {
            m.message = msg;
        }
        m.wall_time_s = start.elapsed().as_secs_f64();
        out.manifest = m;
        out
    };

    let compare = match effective_compare(cfg, spec) {
        Ok(c) => c,
        Err(e) => return finish(manifest, out, Some(e.to_string())),
    };
    let system = match DiscreteSystem::from_problem(spec, cfg.assembly) {
        Ok(s) => s,
        Err(e) => return finish(manifest, out, Some(format!("assembly: {e}"))),
    };
    let solver = match KktSolver::new(&system) {
        Ok(s) => s,
        Err(e) => return finish(manifest, out, Some(e.to_string())),
    };
    let opts = cfg.solve_options();
    let label = format!("{} k={} R={}", spec.name, spec.k, spec.radius);
    let mut report = |it: usize, r: f64| eprintln!("[{label}] iteration {it}: residual {r:.3e}");
    let progress: helmpv::solve::Progress<'_, f64> = if verbose { Some(&mut report) } else { None };
    let (solution, converged) = match solver.solve(&opts, progress) {
        Ok(s) => (s, true),
        Err(SolveError::NonConvergence { partial, .. }) => {
            manifest.message = Some("solver did not reach the tolerance; field is the last iterate".into());
            (*partial, false)
        }
        Err(e) => return finish(manifest, out, Some(e.to_string())),
    };
    let st = &solution.stats;
    manifest.iterations = Some(st.iterations);
    manifest.restarts = Some(st.restarts);
    manifest.residuals = Some(Residuals {
        preconditioned: st.preconditioned_residual,
        constraint: st.constraint_residual,
        stationarity: st.stationarity_residual,
        constraint_backward_error: st.constraint_backward_error,
    });
    manifest.functional_value = Some(solution.functional_value);
    manifest.status = if converged { RunStatus::Ok } else { RunStatus::NotConverged };

    if converged && cfg.minimality_probes > 0 {
        match check_minimality(&solver, &solution, cfg.minimality_probes, 0x5eed, &opts) {
            Ok(rep) => {
                if !rep.holds {
                    manifest.status = RunStatus::Failed;
                    manifest.message = Some("minimality check failed".into());
                }
                manifest.minimality = Some(Minimality {
                    probes: rep.probes,
                    min_increase: finite(rep.min_increase).unwrap_or(0.0),
                    max_constraint_leak: rep.max_constraint_leak,
                    holds: rep.holds,
                });
            }
            Err(e) => manifest.message = Some(format!("minimality check: {e}")),
        }
    }

    let spectral = match to_spectral(&solution.grid, &solution.values) {
        Ok(c) => c,
        Err(e) => {
            manifest.status = RunStatus::Failed;
            out.solution = Some(solution);
            return finish(manifest, out, Some(e.to_string()));
        }
    };

    let errors = match compare {
        CompareMode::None => Ok(None),
        CompareMode::Analytic => exact_solution_constant_n(&spec.source, &spec.refraction, spec.k)
            .map_err(CliError::from)
            .and_then(|u| compare_against(&spectral, &u, cfg))
            .map(Some),
        CompareMode::SelfRef => {
            let mut sub = cfg.clone();
            sub.compare = Some(CompareMode::None);
            sub.minimality_probes = 0;
            let fine = solve_problem(&refined(spec, cfg.self_refine), &sub, verbose);
            match (fine.manifest.status, fine.spectral) {
                (RunStatus::Ok, Some(c)) => compare_against(&spectral, &c, cfg).map(Some),
                _ => Err(CliError::Usage(format!(
                    "refined reference solve failed: {}",
                    fine.manifest.message.unwrap_or_default()
                ))),
            }
        }
    };
    match errors {
        Ok(e) => manifest.errors = e.map(|r| error_summary(compare, &r)),
        Err(e) => {
            manifest.status = RunStatus::Failed;
            manifest.message = Some(format!("comparison: {e}"));
        }
    }
    out.solution = Some(solution);
    out.spectral = Some(spectral);
    finish(manifest, out, None)
}

fn compare_against(
    field: &SpectralCoefficients<f64>,
    reference: &dyn FieldProvider<f64>,
    cfg: &RunConfig,
) -> Result<ErrorReport<f64>, CliError> {
    Ok(error_norms(
        field,
        reference,
        cfg.compare_rho,
        cfg.compare_m_theta,
        cfg.compare_m_rho,
    )?)
}

/// `samples` equispaced angles `2πq/samples` and the field values at radius `rho`.
pub fn boundary_trace(
    coeffs: &SpectralCoefficients<f64>,
    rho: f64,
    samples: usize,
) -> Result<(Vec<f64>, Vec<C64>), CliError> {
    if samples == 0 {
        return Err(CliError::Usage("trace needs at least one sample".into()));
    }
    let thetas: Vec<f64> = (0..samples)
        .map(|q| 2.0 * std::f64::consts::PI * q as f64 / samples as f64)
        .collect();
    let [values, _, _] = coeffs.evaluate_tensor(&[rho], &thetas)?;
    Ok((thetas, values))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn write_with(path: &Path, f: impl FnOnce(BufWriter<File>) -> Result<(), OutputError>) -> Result<(), CliError> {
    f(create(path)?).map_err(out_err(path))
}

pub fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Writes the artifacts of `run` into `dir` and the manifest last, so the
/// manifest only names files that exist. The manifest is written even when
/// writing an artifact fails.
pub fn write_run(dir: &Path, run: &mut RunOutput, trace_rho: Option<f64>, samples: usize) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let artifacts = write_artifacts(dir, run, trace_rho, samples);
    let manifest = &mut run.manifest;
    let result = match artifacts {
        Ok(names) => {
            manifest.artifacts = names;
            Ok(())
        }
        Err(e) => {
            manifest.status = RunStatus::Failed;
            manifest.message = Some(e.to_string());
            Err(e)
        }
    };
    write_json(&dir.join(MANIFEST_FILE), manifest)?;
    result
}

fn write_artifacts(
    dir: &Path,
    run: &RunOutput,
    trace_rho: Option<f64>,
    samples: usize,
) -> Result<Vec<String>, CliError> {
    let mut names = Vec::new();
    let Some(sol) = &run.solution else {
        return Ok(names);
    };
    write_with(&dir.join(FIELD_FILE), |w| output::write_field(w, &sol.grid, &sol.values))?;
    names.push(FIELD_FILE.to_string());
    if run.problem.is_scattering() {
        let total = total_field(&sol.values, run.problem.k, &sol.grid);
        write_with(&dir.join(TOTAL_FILE), |w| output::write_field(w, &sol.grid, &total))?;
        names.push(TOTAL_FILE.to_string());
    }
    if let (Some(rho), Some(coeffs)) = (trace_rho, &run.spectral) {
        let (th, v) = boundary_trace(coeffs, rho, samples)?;
        write_with(&dir.join(TRACE_FILE), |w| output::write_trace(w, rho, &th, &v))?;
        names.push(TRACE_FILE.to_string());
    }
    Ok(names)
}

/// `solve`: one run written to `cfg.out_dir`.
pub fn cmd_solve(cfg: &RunConfig, verbose: bool) -> Result<RunManifest, CliError> {
    let spec = problem_for(cfg, cfg.k, None, None)?;
    effective_compare(cfg, &spec)?;
    let mut run = solve_problem(&spec, cfg, verbose);
    write_run(&cfg.out_dir, &mut run, cfg.trace_rho, cfg.trace_samples)?;
    Ok(run.manifest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Radius,
    Wavenumber,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::Radius => "R",
            Self::Wavenumber => "k",
        }
    }
}

pub fn norms_row(param: f64, e: &ErrorSummary) -> NormsRow {
    NormsRow {
        param,
        l2: e.l2,
        l2_rel: e.l2_rel,
        h1: e.h1,
        h1_rel: e.h1_rel,
        linf: e.linf,
    }
}

fn slope(samples: Vec<(f64, f64)>) -> Option<SlopeFit> {
    let n = samples.len();
    fit_rate(&samples).ok().map(|f| SlopeFit {
        slope: f.slope,
        intercept: f.intercept,
        rms_residual: f.rms_residual,
        samples: n,
    })
}

/// Log-log fits of every norm over the rows with `param` in `[lo, hi]`.
pub fn regime_fits(regime: &str, rows: &[NormsRow], lo: f64, hi: f64) -> RegimeFits {
    let sel: Vec<&NormsRow> = rows.iter().filter(|r| r.param >= lo && r.param <= hi).collect();
    let pick = |f: &dyn Fn(&NormsRow) -> Option<f64>| {
        slope(sel.iter().filter_map(|r| f(r).map(|e| (r.param, e))).collect())
    };
    RegimeFits {
        regime: regime.into(),
        l2: pick(&|r| Some(r.l2)),
        h1: pick(&|r| Some(r.h1)),
        linf: pick(&|r| Some(r.linf)),
        l2_rel: pick(&|r| r.l2_rel),
        h1_rel: pick(&|r| r.h1_rel),
    }
}

/// `sweep-r` / `sweep-k`: one run directory per value, `norms.csv` and a
/// sweep manifest with slope fits.
pub fn cmd_sweep(cfg: &RunConfig, param: SweepParam, verbose: bool) -> Result<SweepManifest, CliError> {
    let start = Instant::now();
    let values = &cfg.sweep_values;
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs a list of values (--values or [sweep] values)".into()));
    }
    if param == SweepParam::Radius && values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("radius list must be strictly ascending".into()));
    }
    let specs = values
        .iter()
        .map(|&v| match param {
            SweepParam::Radius => {
                let m_rho = cfg.m_rho.or_else(|| {
                    (cfg.m_rho_per_radius > 0).then(|| (cfg.m_rho_per_radius as f64 * v).round() as usize)
                });
                problem_for(cfg, cfg.k, Some(v), m_rho)
            }
            SweepParam::Wavenumber => problem_for(cfg, v, None, None),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = cfg.clone();
    if cfg.compare.is_none() {
        cfg.compare = Some(effective_compare(&cfg, &specs[0])?);
    }
    if cfg.compare == Some(CompareMode::None) {
        return Err(CliError::Usage("a sweep needs a reference (--compare analytic or self)".into()));
    }
    for s in &specs {
        effective_compare(&cfg, s)?;
    }
    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;

    let run_one = |(v, spec): (&f64, &ProblemSpec<f64>)| -> Result<(f64, String, RunManifest), CliError> {
        let name = format!("{}-{}", param.name(), v);
        let mut run = solve_problem(spec, &cfg, verbose);
        write_run(&cfg.out_dir.join(&name), &mut run, cfg.trace_rho, cfg.trace_samples)?;
        Ok((*v, name, run.manifest))
    };
    let runs: Vec<_> = if cfg.parallel {
        values.par_iter().zip(specs.par_iter()).map(run_one).collect::<Result<_, _>>()?
    } else {
        values.iter().zip(specs.iter()).map(run_one).collect::<Result<_, _>>()?
    };

    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (v, dir, m) in &runs {
        if let (RunStatus::Ok, Some(e)) = (m.status, &m.errors) {
            rows.push(norms_row(*v, e));
        }
        points.push(SweepPoint {
            param: *v,
            status: m.status,
            dir: dir.clone(),
        });
    }
    let norms_path = cfg.out_dir.join(NORMS_FILE);
    write_with(&norms_path, |w| output::write_norms(w, param.name(), &rows))?;

    let mut fits = vec![regime_fits("all", &rows, 0.0, f64::INFINITY)];
    if param == SweepParam::Wavenumber {
        fits.push(regime_fits("small", &rows, 0.0, cfg.k_split));
        fits.push(regime_fits("large", &rows, cfg.k_split, f64::INFINITY));
    }
    let status = if points.iter().any(|p| p.status == RunStatus::Failed) {
        RunStatus::Failed
    } else if points.iter().any(|p| p.status == RunStatus::NotConverged) {
        RunStatus::NotConverged
    } else {
        RunStatus::Ok
    };
    let summary = SweepManifest {
        schema: SWEEP_SCHEMA.into(),
        status,
        problem: specs[0].name.clone(),
        param: param.name().into(),
        points,
        fits,
        wall_time_s: start.elapsed().as_secs_f64(),
        artifacts: vec![NORMS_FILE.into()],
    };
    write_json(&cfg.out_dir.join(SWEEP_FILE), &summary)?;
    Ok(summary)
}

/// `trace`: values of a dumped field on the circle `|x| = rho`.
pub fn cmd_trace(field: &Path, rho: f64, samples: usize, out: &Path) -> Result<(Vec<f64>, Vec<C64>), CliError> {
    let file = File::open(field).map_err(io_err(field))?;
    let (grid, values) = output::read_field(std::io::BufReader::new(file)).map_err(out_err(field))?;
    if !(rho >= 0.0 && rho <= grid.radius()) {
        return Err(CliError::Usage(format!(
            "trace radius {rho} is outside the dumped disk of radius {}",
            grid.radius()
        )));
    }
    let coeffs = to_spectral(&grid, &values)?;
    let (th, v) = boundary_trace(&coeffs, rho, samples)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    write_with(out, |w| output::write_trace(w, rho, &th, &v))?;
    Ok((th, v))
}

pub fn list_problems() -> String {
    let mut s = String::from("name   R   M_theta  M_rho  description\n");
    for (name, desc, (r, mt, mr)) in CATALOG {
        s.push_str(&format!("{name:<6} {r:<3} {mt:<8} {mr:<6} {desc}\n"));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Quick end-to-end checks of the harness; runs in well under a second.
pub fn self_test() -> Vec<Check> {
    let mut out = Vec::new();

    // fit path of the sweeps on injected C/R errors
    let rows: Vec<NormsRow> = [4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|&r| NormsRow {
            param: r,
            l2: 0.3 / r,
            l2_rel: Some(0.1 / r),
            h1: 0.7 / r,
            h1_rel: None,
            linf: 0.2 / r,
        })
        .collect();
    let fits = regime_fits("all", &rows, 0.0, f64::INFINITY);
    let s = [&fits.l2, &fits.h1, &fits.linf, &fits.l2_rel]
        .iter()
        .map(|f| f.as_ref().map_or(f64::NAN, |f| f.slope))
        .fold(0.0f64, |m, s| m.max((s + 1.0).abs()));
    out.push(check("synthetic 1/R sweep slope", s < 1e-12 && fits.h1_rel.is_none(), format!("max |slope + 1| = {s:.1e}")));

    // zero source gives the zero field
    let mut cfg = RunConfig {
        problem: "zero".into(),
        m_theta: Some(7),
        m_rho: Some(12),
        minimality_probes: 0,
        compare: Some(CompareMode::None),
        ..RunConfig::default()
    };
    let run = solve_problem(&problem_for(&cfg, 1.0, None, None).unwrap(), &cfg, false);
    let max = run
        .solution
        .as_ref()
        .map_or(f64::NAN, |s| s.values.iter().fold(0.0, |m, v| m.max(v.norm())));
    out.push(check("zero source, zero field", run.manifest.is_ok() && max == 0.0, format!("max |v| = {max:e}")));

    // small analytic solve: solver contract and sensible error
    cfg.problem = "f1".into();
    cfg.m_theta = Some(11);
    cfg.m_rho = Some(40);
    cfg.minimality_probes = 2;
    cfg.compare = Some(CompareMode::Analytic);
    let run = solve_problem(&problem_for(&cfg, 1.0, None, None).unwrap(), &cfg, false);
    let m = &run.manifest;
    let be = m.residuals.as_ref().map_or(f64::NAN, |r| r.constraint_backward_error);
    let minimal = m.minimality.as_ref().is_some_and(|x| x.holds);
    out.push(check(
        "f1 solve converges",
        m.is_ok() && be <= 1e-10 && minimal,
        format!("status {:?}, backward error {be:.1e}, minimal {minimal}", m.status),
    ));
    let l2 = m.errors.as_ref().map_or(f64::NAN, |e| e.l2);
    out.push(check("f1 error is small", l2 < 5e-2, format!("L2(B1) error {l2:.3e}")));

    // plane wave injected on the grid: trace against analytic values
    let k = 1.5;
    let grid = helmpv::grid::build_disk_grid(2.0, 31, 24).unwrap();
    let wave = |r: f64, t: f64| C64::new(0.0, k * r * t.cos()).exp();
    let values = grid.sample_polar(wave);
    let mut buf = Vec::new();
    let round = output::write_field(&mut buf, &grid, &values)
        .ok()
        .and_then(|_| output::read_field(buf.as_slice()).ok());
    let err = round
        .and_then(|(g, v)| to_spectral(&g, &v).ok())
        .and_then(|c| boundary_trace(&c, 1.7, 64).ok())
        .map_or(f64::NAN, |(th, v)| {
            th.iter().zip(&v).fold(0.0, |m, (t, v)| m.max((v - wave(1.7, *t)).norm()))
        });
    out.push(check("plane-wave trace", err < 1e-8, format!("max error {err:.1e}")));

    let constant = vec![C64::new(2.0, -1.0); grid.len()];
    let err = to_spectral(&grid, &constant)
        .ok()
        .and_then(|c| boundary_trace(&c, 2.0, 16).ok())
        .map_or(f64::NAN, |(_, v)| v.iter().fold(0.0, |m, v| m.max((v - constant[0]).norm())));
    out.push(check("constant trace", err < 1e-12, format!("max error {err:.1e}")));

    let text = serde_json::to_string(m).unwrap_or_default();
    let back: Option<RunManifest> = serde_json::from_str(&text).ok();
    out.push(check("manifest round trip", back.as_ref() == Some(m), "json"));
    out
}
