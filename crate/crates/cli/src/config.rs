//! Run configuration: defaults, a flat `key = value` file format with
//! `[section]` headers, and command-line overrides.
//!
//! ```text
//! # comment
//! [problem]
//! name = f1            # catalog name, see `helmpv list-problems`
//! k = 1
//! radius = 4
//! m_theta = 21         # odd
//! m_rho = 100
//! fold = spectral      # spectral | index-shift
//! functional = polar   # polar | literal
//! source_sampling = pointwise   # pointwise | cell-average[:n]
//!
//! [solver]
//! tolerance = 1e-10
//! max_iterations = 500
//! restart = 60
//! minimality_probes = 4   # random null-space checks, 0 disables
//!
//! [compare]
//! mode = analytic      # analytic | none | self
//! rho = 1              # errors are measured on B_rho
//! m_theta = 41         # comparison grid
//! m_rho = 40
//! refine = 1.5         # resolution factor of the `self` reference
//!
//! [sweep]
//! values = 4, 8, 16
//! m_rho_per_radius = 25   # sweep-r resolution rule, 0 disables
//! k_split = 1             # sweep-k regime boundary
//! parallel = false
//!
//! [trace]
//! rho = 7
//! samples = 256
//!
//! [output]
//! dir = out
//! ```

use helmpv::assembly::{AssemblyOptions, FunctionalForm, SourceSampling};
use helmpv::grid::FoldKind;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses the raw file into entries, checking syntax, known sections and
/// duplicate keys.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut section = String::new();
    let mut out: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(line, "unterminated section header"))?
                .trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::new(line, format!("unknown section [{name}]")));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::new(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if section.is_empty() {
            return Err(ConfigError::new(line, "key outside of any section"));
        }
        let known = SECTIONS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, keys)| keys.contains(&key))
            .unwrap_or(false);
        if !known {
            return Err(ConfigError::new(line, format!("unknown key `{key}` in [{section}]")));
        }
        if value.is_empty() {
            return Err(ConfigError::new(line, format!("empty value for `{key}`")));
        }
        if let Some(prev) = out.iter().find(|e| e.section == section && e.key == key) {
            return Err(ConfigError::new(
                line,
                format!("duplicate key `{key}` (first set on line {})", prev.line),
            ));
        }
        out.push(Entry {
            section: section.clone(),
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(out)
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("problem", &["name", "k", "radius", "m_theta", "m_rho", "fold", "functional", "source_sampling"]),
    ("solver", &["tolerance", "max_iterations", "restart", "minimality_probes"]),
    ("compare", &["mode", "rho", "m_theta", "m_rho", "refine"]),
    ("sweep", &["values", "m_rho_per_radius", "k_split", "parallel"]),
    ("trace", &["rho", "samples"]),
    ("output", &["dir"]),
];

/// Reference used for error norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    /// Hankel-convolution exact solution (constant index, Gaussian sources).
    Analytic,
    /// No error norms.
    None,
    /// Same problem at a finer resolution.
    #[serde(rename = "self")]
    #[value(name = "self")]
    SelfRef,
}

impl FromStr for CompareMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Self::Analytic),
            "none" => Ok(Self::None),
            "self" => Ok(Self::SelfRef),
            _ => Err(format!("expected analytic | none | self, got `{s}`")),
        }
    }
}

fn parse_fold(s: &str) -> Result<FoldKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "spectral" => Ok(FoldKind::Spectral),
        "index-shift" | "index_shift" => Ok(FoldKind::IndexShift),
        _ => Err(format!("expected spectral | index-shift, got `{s}`")),
    }
}

fn parse_form(s: &str) -> Result<FunctionalForm, String> {
    match s.to_ascii_lowercase().as_str() {
        "polar" => Ok(FunctionalForm::Polar),
        "literal" => Ok(FunctionalForm::Literal),
        _ => Err(format!("expected polar | literal, got `{s}`")),
    }
}

/// `pointwise`, `cell-average` (8×8 sub-samples) or `cell-average:n`.
pub fn parse_sampling(s: &str) -> Result<SourceSampling, String> {
    let s = s.to_ascii_lowercase();
    match s.split_once(':') {
        None if s == "pointwise" => Ok(SourceSampling::Pointwise),
        None if s == "cell-average" => Ok(SourceSampling::CellAverage(8)),
        Some(("cell-average", n)) => match n.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(SourceSampling::CellAverage(n)),
            _ => Err(format!("bad sub-sample count `{n}`")),
        },
        _ => Err(format!("expected pointwise | cell-average[:n], got `{s}`")),
    }
}

pub fn sampling_name(s: SourceSampling) -> String {
    match s {
        SourceSampling::Pointwise => "pointwise".into(),
        SourceSampling::CellAverage(n) => format!("cell-average:{n}"),
    }
}

pub fn fold_name(f: FoldKind) -> &'static str {
    match f {
        FoldKind::Spectral => "spectral",
        FoldKind::IndexShift => "index-shift",
    }
}

pub fn form_name(f: FunctionalForm) -> &'static str {
    match f {
        FunctionalForm::Polar => "polar",
        FunctionalForm::Literal => "literal",
    }
}

/// Parses a comma-separated list of positive numbers; `a/b` fractions are
/// accepted (`1/4, 1/2, 1`).
pub fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let v = match t.split_once('/') {
                Some((a, b)) => {
                    let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{t}`"))?;
                    let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{t}`"))?;
                    a / b
                }
                None => t.parse().map_err(|_| format!("bad number `{t}`"))?,
            };
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(format!("value must be positive, got `{t}`"))
            }
        })
        .collect()
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub k: f64,
    /// `None` means the catalog default.
    pub radius: Option<f64>,
    pub m_theta: Option<usize>,
    pub m_rho: Option<usize>,
    pub assembly: AssemblyOptions,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restart: usize,
    pub minimality_probes: usize,
    /// `None` means analytic when available, otherwise none.
    pub compare: Option<CompareMode>,
    pub compare_rho: f64,
    pub compare_m_theta: usize,
    pub compare_m_rho: usize,
    pub self_refine: f64,
    pub sweep_values: Vec<f64>,
    pub m_rho_per_radius: usize,
    pub k_split: f64,
    pub parallel: bool,
    pub trace_rho: Option<f64>,
    pub trace_samples: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: "f1".into(),
            k: 1.0,
            radius: None,
            m_theta: None,
            m_rho: None,
            assembly: AssemblyOptions::default(),
            tolerance: 1e-10,
            max_iterations: 500,
            restart: 60,
            minimality_probes: 4,
            compare: None,
            compare_rho: 1.0,
            compare_m_theta: 41,
            compare_m_rho: 40,
            self_refine: 1.5,
            sweep_values: Vec::new(),
            m_rho_per_radius: 25,
            k_split: 1.0,
            parallel: false,
            trace_rho: None,
            trace_samples: 256,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn value<T: FromStr>(e: &Entry) -> Result<T, ConfigError> {
    e.value
        .parse()
        .map_err(|_| ConfigError::new(e.line, format!("invalid value `{}` for `{}`", e.value, e.key)))
}

fn positive(e: &Entry) -> Result<f64, ConfigError> {
    let v: f64 = value(e)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(e.line, format!("`{}` must be positive", e.key)))
    }
}

fn with_line<T>(e: &Entry, r: Result<T, String>) -> Result<T, ConfigError> {
    r.map_err(|m| ConfigError::new(e.line, format!("`{}`: {m}", e.key)))
}

impl RunConfig {
    /// Applies a config file on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for e in parse_entries(text)? {
            match (e.section.as_str(), e.key.as_str()) {
                ("problem", "name") => {
                    helmpv::problems::catalog_entry::<f64>(&e.value)
                        .map_err(|err| ConfigError::new(e.line, err.to_string()))?;
                    self.problem = e.value.clone();
                }
                ("problem", "k") => self.k = positive(&e)?,
                ("problem", "radius") => self.radius = Some(positive(&e)?),
                ("problem", "m_theta") => self.m_theta = Some(value(&e)?),
                ("problem", "m_rho") => self.m_rho = Some(value(&e)?),
                ("problem", "fold") => self.assembly.fold = with_line(&e, parse_fold(&e.value))?,
                ("problem", "functional") => self.assembly.form = with_line(&e, parse_form(&e.value))?,
                ("problem", "source_sampling") => self.assembly.source = with_line(&e, parse_sampling(&e.value))?,
                ("solver", "tolerance") => self.tolerance = positive(&e)?,
                ("solver", "max_iterations") => self.max_iterations = value(&e)?,
                ("solver", "restart") => self.restart = value(&e)?,
                ("solver", "minimality_probes") => self.minimality_probes = value(&e)?,
                ("compare", "mode") => self.compare = Some(with_line(&e, e.value.parse())?),
                ("compare", "rho") => self.compare_rho = positive(&e)?,
                ("compare", "m_theta") => self.compare_m_theta = value(&e)?,
                ("compare", "m_rho") => self.compare_m_rho = value(&e)?,
                ("compare", "refine") => self.self_refine = positive(&e)?,
                ("sweep", "values") => self.sweep_values = with_line(&e, parse_values(&e.value))?,
                ("sweep", "m_rho_per_radius") => self.m_rho_per_radius = value(&e)?,
                ("sweep", "k_split") => self.k_split = positive(&e)?,
                ("sweep", "parallel") => self.parallel = value(&e)?,
                ("trace", "rho") => self.trace_rho = Some(positive(&e)?),
                ("trace", "samples") => self.trace_samples = value(&e)?,
                ("output", "dir") => self.out_dir = PathBuf::from(&e.value),
                _ => unreachable!("keys are validated by parse_entries"),
            }
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn solve_options(&self) -> helmpv::solve::SolveOptions<f64> {
        helmpv::solve::SolveOptions {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            restart: self.restart,
        }
    }
}
