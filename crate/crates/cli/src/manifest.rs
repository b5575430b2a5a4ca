//! JSON run manifests, written for every run including failed ones.

use crate::config::CompareMode;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MANIFEST_SCHEMA: &str = "helmpv-manifest v1";
pub const SWEEP_SCHEMA: &str = "helmpv-sweep v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    NotConverged,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Relative residual of the preconditioned block system (convergence test).
    pub preconditioned: f64,
    /// `‖Ãv − φ‖ / ‖φ‖`.
    pub constraint: f64,
    /// `‖H̃v + Ã†λ‖ / ‖H̃v‖`.
    pub stationarity: f64,
    /// `‖Ãv − φ‖_∞ / (‖Ã‖_∞‖v‖_∞ + ‖φ‖_∞)`.
    pub constraint_backward_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimality {
    pub probes: usize,
    pub min_increase: f64,
    pub max_constraint_leak: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub reference: CompareMode,
    /// Errors are measured on `B_rho`.
    pub rho: f64,
    pub grid: (usize, usize),
    pub l2: f64,
    pub l2_rel: Option<f64>,
    pub h1: f64,
    pub h1_rel: Option<f64>,
    pub linf: f64,
    pub linf_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub status: RunStatus,
    pub message: Option<String>,
    pub problem: String,
    pub k: f64,
    pub radius: f64,
    pub m_theta: usize,
    pub m_rho: usize,
    pub fold: String,
    pub functional: String,
    pub source_sampling: String,
    pub solver: SolverSettings,
    pub wall_time_s: f64,
    pub iterations: Option<usize>,
    pub restarts: Option<usize>,
    pub residuals: Option<Residuals>,
    pub functional_value: Option<f64>,
    pub minimality: Option<Minimality>,
    pub errors: Option<ErrorSummary>,
    /// File names relative to the manifest's directory.
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }

    pub fn missing_artifacts(&self, dir: &Path) -> Vec<String> {
        self.artifacts
            .iter()
            .filter(|a| !dir.join(a).is_file())
            .cloned()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub status: RunStatus,
    /// Run directory relative to the sweep directory.
    pub dir: String,
}

/// Fits of `log(error)` against `log(param)` for one range of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeFits {
    pub regime: String,
    pub l2: Option<SlopeFit>,
    pub h1: Option<SlopeFit>,
    pub linf: Option<SlopeFit>,
    pub l2_rel: Option<SlopeFit>,
    pub h1_rel: Option<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub schema: String,
    pub status: RunStatus,
    pub problem: String,
    /// `"R"` or `"k"`.
    pub param: String,
    pub points: Vec<SweepPoint>,
    pub fits: Vec<RegimeFits>,
    pub wall_time_s: f64,
    pub artifacts: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunManifest {
        RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            status: RunStatus::Ok,
            message: None,
            problem: "f1".into(),
            k: 0.1,
            radius: 4.0,
            m_theta: 21,
            m_rho: 100,
            fold: "spectral".into(),
            functional: "polar".into(),
            source_sampling: "pointwise".into(),
            solver: SolverSettings {
                tolerance: 1e-10,
                max_iterations: 500,
                restart: 60,
            },
            wall_time_s: 0.123456789,
            iterations: Some(1),
            restarts: Some(0),
            residuals: Some(Residuals {
                preconditioned: 3.3e-17,
                constraint: 1.0 / 3.0,
                stationarity: 2.2250738585072014e-308,
                constraint_backward_error: 5e-324,
            }),
            functional_value: Some(std::f64::consts::E),
            minimality: Some(Minimality {
                probes: 4,
                min_increase: 1.2345678901234567e-9,
                max_constraint_leak: 1e-15,
                holds: true,
            }),
            errors: Some(ErrorSummary {
                reference: CompareMode::SelfRef,
                rho: 1.0,
                grid: (41, 40),
                l2: 9.256e-3,
                l2_rel: Some(0.2048),
                h1: 0.1,
                h1_rel: None,
                linf: 0.3,
                linf_rel: Some(0.7),
            }),
            artifacts: vec!["field.csv".into()],
        }
    }

    #[test]
    fn manifest_round_trips() {
        let m = sample();
        let text = serde_json::to_string_pretty(&m).unwrap();
        assert!(text.contains("\"reference\": \"self\""));
        assert!(text.contains("\"status\": \"ok\""));
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn missing_artifacts_listed() {
        let dir = std::env::temp_dir();
        let mut m = sample();
        m.artifacts = vec!["definitely-not-here.csv".into()];
        assert_eq!(m.missing_artifacts(&dir), m.artifacts);
    }
}
