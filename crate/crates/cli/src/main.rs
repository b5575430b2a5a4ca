use clap::{Args, Parser, Subcommand};
use helmpv_cli::config::{parse_sampling, parse_values, CompareMode, RunConfig};
use helmpv_cli::run::{self, SweepParam};
use helmpv_cli::{CliError, RunStatus};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "helmpv", version, about = "Outgoing Helmholtz solutions on a disk by radiation-functional minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write field.csv and manifest.json.
    Solve(RunArgs),
    /// Solve for a list of disk radii (M_rho = 25 R unless --m-rho is given).
    SweepR(RunArgs),
    /// Solve for a list of wavenumbers.
    SweepK(RunArgs),
    /// Evaluate a dumped field on the circle |x| = rho.
    Trace(TraceArgs),
    /// Print the problem catalog.
    ListProblems,
    /// Run the built-in harness checks.
    SelfTest,
}

#[derive(Args)]
struct RunArgs {
    /// Config file (`[section]` + `key = value`); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    k: Option<f64>,
    /// Disk radius R.
    #[arg(long)]
    r_domain: Option<f64>,
    #[arg(long)]
    m_theta: Option<usize>,
    #[arg(long)]
    m_rho: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    compare: Option<CompareMode>,
    /// Run independent sweep points concurrently.
    #[arg(long)]
    parallel: bool,
    /// Sweep values, comma separated (fractions like 1/4 allowed).
    #[arg(long)]
    values: Option<String>,
    /// Right-hand side from point values or cell means (`cell-average[:n]`).
    #[arg(long)]
    source_sampling: Option<String>,
    /// Also write trace.csv at this radius.
    #[arg(long)]
    trace_rho: Option<f64>,
    /// Number of random null-space probes of the minimality check.
    #[arg(long)]
    minimality_probes: Option<usize>,
    /// Print solver progress to stderr.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct TraceArgs {
    /// Field dump written by `solve`.
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        cfg.apply_text(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    if let Some(p) = &args.problem {
        helmpv::problems::catalog_entry::<f64>(p)?;
        cfg.problem = p.clone();
    }
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
        }
    };
    if let Some(k) = args.k {
        cfg.k = positive("k", k)?;
    }
    if let Some(r) = args.r_domain {
        cfg.radius = Some(positive("r-domain", r)?);
    }
    if let Some(t) = args.tol {
        cfg.tolerance = positive("tol", t)?;
    }
    cfg.m_theta = args.m_theta.or(cfg.m_theta);
    cfg.m_rho = args.m_rho.or(cfg.m_rho);
    if let Some(n) = args.max_iter {
        cfg.max_iterations = n;
    }
    if let Some(d) = &args.out_dir {
        cfg.out_dir = d.clone();
    }
    if args.compare.is_some() {
        cfg.compare = args.compare;
    }
    cfg.parallel |= args.parallel;
    if let Some(v) = &args.values {
        cfg.sweep_values = parse_values(v).map_err(|e| CliError::Usage(format!("--values: {e}")))?;
    }
    if let Some(s) = &args.source_sampling {
        cfg.assembly.source =
            parse_sampling(s).map_err(|e| CliError::Usage(format!("--source-sampling: {e}")))?;
    }
    if let Some(r) = args.trace_rho {
        cfg.trace_rho = Some(r);
    }
    if let Some(n) = args.minimality_probes {
        cfg.minimality_probes = n;
    }
    Ok(cfg)
}

fn print_status(what: &str, status: RunStatus, message: Option<&str>) -> ExitCode {
    match message {
        Some(m) => println!("{what}: {status:?} ({m})"),
        None => println!("{what}: {status:?}"),
    }
    if status == RunStatus::Ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn sweep(args: &RunArgs, param: SweepParam) -> Result<ExitCode, CliError> {
    let cfg = resolve(args)?;
    let summary = run::cmd_sweep(&cfg, param, args.verbose)?;
    for p in &summary.points {
        println!("{} = {}: {:?}", summary.param, p.param, p.status);
    }
    for f in &summary.fits {
        let show = |name: &str, fit: &Option<helmpv_cli::manifest::SlopeFit>| {
            if let Some(fit) = fit {
                println!("[{}] {name} slope {:.3} ({} points)", f.regime, fit.slope, fit.samples);
            }
        };
        show("L2", &f.l2);
        show("H1", &f.h1);
        show("Linf", &f.linf);
    }
    let dir = cfg.out_dir.display().to_string();
    Ok(print_status(&dir, summary.status, None))
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve(args) => {
            let cfg = resolve(&args)?;
            let m = run::cmd_solve(&cfg, args.verbose)?;
            if let Some(e) = &m.errors {
                let rel = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.3e}"));
                println!(
                    "errors on B_{}: L2 {:.3e} (rel {}), H1 {:.3e} (rel {}), Linf {:.3e}",
                    e.rho, e.l2, rel(e.l2_rel), e.h1, rel(e.h1_rel), e.linf
                );
            }
            let dir = cfg.out_dir.display().to_string();
            Ok(print_status(&dir, m.status, m.message.as_deref()))
        }
        Command::SweepR(args) => sweep(&args, SweepParam::Radius),
        Command::SweepK(args) => sweep(&args, SweepParam::Wavenumber),
        Command::Trace(args) => {
            let (th, _) = run::cmd_trace(&args.field, args.rho, args.samples, &args.out)?;
            println!("{}: {} samples at rho = {}", args.out.display(), th.len(), args.rho);
            Ok(ExitCode::SUCCESS)
        }
        Command::ListProblems => {
            print!("{}", run::list_problems());
            Ok(ExitCode::SUCCESS)
        }
        Command::SelfTest => {
            let checks = run::self_test();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
