//! JSON config documents for the single-run commands and their manifests.

use std::fs;
use std::path::{Path, PathBuf};

use nawoa::benchmarks::BenchmarkId;
use nawoa::{Algorithm, InitMode, TrialReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const RUN_MANIFEST_FORMAT: &str = "nawoa-run-manifest";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeConfig {
    pub function: Option<BenchmarkId>,
    pub algorithm: Algorithm,
    pub init: Option<InitMode>,
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            function: None,
            algorithm: Algorithm::Nawoa,
            init: None,
            population: 30,
            iterations: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TuneConfig {
    pub command: Option<PathBuf>,
    pub args: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Seconds per evaluation.
    pub timeout: f64,
    pub max_restarts: u32,
    pub algorithm: Algorithm,
    pub init: Option<InitMode>,
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self {
            command: None,
            args: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            timeout: 30.0,
            max_restarts: 2,
            algorithm: Algorithm::Nawoa,
            init: None,
            population: 20,
            iterations: 50,
            seed: 0,
        }
    }
}

#[derive(Serialize)]
pub struct RunResult<'a> {
    pub fitness: f64,
    pub position: &'a [f64],
    pub evaluations: u64,
}

/// Output manifest of `optimize` and `tune`: the effective config plus the result.
#[derive(Serialize)]
pub struct RunManifest<'a, C> {
    pub format: &'static str,
    pub version: u32,
    pub command: &'static str,
    pub config: &'a C,
    pub result: RunResult<'a>,
}

impl<'a, C> RunManifest<'a, C> {
    pub fn new(command: &'static str, config: &'a C, report: &'a TrialReport) -> Self {
        Self {
            format: RUN_MANIFEST_FORMAT,
            version: 1,
            command,
            config,
            result: RunResult {
                fitness: report
                    .final_best
                    .fitness()
                    .expect("reported best is evaluated"),
                position: report.final_best.position(),
                evaluations: report.evaluations,
            },
        }
    }
}

/// Reads a config document. A manifest written by an earlier run is accepted
/// too; its `config` section is used.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if value.get("format").is_some() {
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
    }
    serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))
}
