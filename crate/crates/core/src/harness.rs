//! Repeated-trial experiment protocol, Ave/Std aggregation and result files.
//!
//! Trial `i` of every (algorithm, benchmark) pair runs with seed
//! `base_seed + i`, so competing algorithms see the same seed sequence. Output
//! is ordered by (algorithm, benchmark, run) regardless of worker count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmarks::{BenchmarkId, BenchmarkObjective};
use crate::error::{Error, Result};
use crate::init::InitMode;
use crate::nawoa::{self, NawoaParams};
use crate::objective::{Objective, ObjectiveSpec};
use crate::space::Individual;
use crate::woa::{self, WoaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Woa,
    Nawoa,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Woa => "woa",
            Algorithm::Nawoa => "nawoa",
        }
    }

    /// Pseudo-random start for classical WOA, good nodes for NAWOA.
    pub fn default_init(self) -> InitMode {
        match self {
            Algorithm::Woa => InitMode::Random,
            Algorithm::Nawoa => InitMode::GoodNodes,
        }
    }

    /// One trial with the default parameters of the algorithm (`b = 1`, `k = 1`).
    pub fn optimize<O: Objective>(
        self,
        objective: &mut ObjectiveSpec<O>,
        population: usize,
        iterations: usize,
        seed: u64,
        init: InitMode,
    ) -> Result<TrialReport, Box<TrialFailure>> {
        match self {
            Algorithm::Woa => woa::optimize(
                objective,
                &WoaParams::new(population, iterations),
                seed,
                init,
            ),
            Algorithm::Nawoa => nawoa::optimize(
                objective,
                &NawoaParams::new(population, iterations),
                seed,
                init,
            ),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "woa" => Ok(Algorithm::Woa),
            "nawoa" => Ok(Algorithm::Nawoa),
            other => Err(format!(
                "unknown algorithm `{other}` (expected woa or nawoa)"
            )),
        }
    }
}

pub fn parse_algorithm_list(spec: &str) -> std::result::Result<Vec<Algorithm>, String> {
    let algs = spec
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if algs.is_empty() {
        return Err("no algorithms given".into());
    }
    Ok(algs)
}

/// Outcome of one completed trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub algorithm: String,
    pub benchmark: String,
    pub seed: u64,
    /// Best-so-far fitness after initialization and after each iteration
    /// (`T + 1` values, non-increasing).
    pub trace: Vec<f64>,
    pub final_best: Individual,
    pub evaluations: u64,
    #[serde(serialize_with = "as_secs")]
    pub wall_time: Duration,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// A trial aborted by an error; the trace recorded so far is kept.
#[derive(Debug, Error)]
#[error("{algorithm} on {benchmark} (seed {seed}) aborted after {} trace points: {error}", trace.len())]
pub struct TrialFailure {
    pub algorithm: String,
    pub benchmark: String,
    pub seed: u64,
    pub trace: Vec<f64>,
    pub best: Option<Individual>,
    #[source]
    pub error: Error,
}

impl TrialFailure {
    pub(crate) fn before_start(
        algorithm: &str,
        benchmark: &str,
        seed: u64,
        error: Error,
    ) -> Box<Self> {
        Box::new(Self {
            algorithm: algorithm.to_string(),
            benchmark: benchmark.to_string(),
            seed,
            trace: Vec::new(),
            best: None,
            error,
        })
    }
}

/// Parameters of a benchmark campaign. Also the JSON config format; missing
/// keys take their default values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    pub algorithms: Vec<Algorithm>,
    pub functions: Vec<BenchmarkId>,
    pub runs: usize,
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            algorithms: vec![Algorithm::Woa, Algorithm::Nawoa],
            functions: BenchmarkId::all().collect(),
            runs: 30,
            population: 30,
            iterations: 500,
            seed: 0,
            workers: 1,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required");
        }
        if self.functions.is_empty() {
            return bad("at least one benchmark function is required");
        }
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        Ok(())
    }
}

pub fn trial_seed(base_seed: u64, run: usize) -> u64 {
    base_seed.wrapping_add(run as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: Algorithm,
    pub benchmark: BenchmarkId,
    pub ave: f64,
    pub std: f64,
    /// Completed trials the statistics are computed over.
    pub runs: usize,
    pub failed: usize,
    /// Fewer than two completed trials: `std` is 0 by convention.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub algorithm: Algorithm,
    pub benchmark: BenchmarkId,
    pub run: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct ProtocolOutcome {
    pub rows: Vec<AggregateRow>,
    /// Completed trials ordered by (algorithm, benchmark, run).
    pub reports: Vec<TrialReport>,
    pub failures: Vec<FailureRecord>,
    /// Partial traces of failed trials, keyed like `failures`.
    pub partial_traces: Vec<Vec<f64>>,
}

impl ProtocolOutcome {
    pub fn row(&self, algorithm: Algorithm, benchmark: BenchmarkId) -> Option<&AggregateRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.benchmark == benchmark)
    }

    /// Final best fitness of every completed trial of one pair, in run order.
    pub fn final_bests(&self, algorithm: Algorithm, benchmark: BenchmarkId) -> Vec<f64> {
        let (alg, bench) = (algorithm.name(), benchmark.to_string());
        self.reports
            .iter()
            .filter(|r| r.algorithm == alg && r.benchmark == bench)
            .map(final_fitness)
            .collect()
    }
}

fn final_fitness(report: &TrialReport) -> f64 {
    report
        .final_best
        .fitness()
        .expect("completed trials have an evaluated best")
}

/// Mean and sample standard deviation (`n - 1` denominator; 0 for one value).
pub fn aggregate(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot aggregate an empty sample".into(),
        ));
    }
    let n = values.len() as f64;
    let ave = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return Ok((ave, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - ave).powi(2)).sum();
    Ok((ave, (ss / (n - 1.0)).sqrt()))
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid protocol config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("could not start worker pool: {0}")]
    Pool(String),
}

struct Job {
    algorithm: Algorithm,
    benchmark: BenchmarkId,
    run: usize,
    seed: u64,
}

fn run_job(config: &ProtocolConfig, job: &Job) -> Result<TrialReport, Box<TrialFailure>> {
    let mut objective = BenchmarkObjective::spec(job.benchmark, job.seed);
    job.algorithm.optimize(
        &mut objective,
        config.population,
        config.iterations,
        job.seed,
        job.algorithm.default_init(),
    )
}

/// Runs every (algorithm, benchmark, run) trial and aggregates final bests.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolOutcome, HarnessError> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &algorithm in &config.algorithms {
        for &benchmark in &config.functions {
            for run in 0..config.runs {
                jobs.push(Job {
                    algorithm,
                    benchmark,
                    run,
                    seed: trial_seed(config.seed, run),
                });
            }
        }
    }

    let results: Vec<_> = if config.workers == 1 {
        jobs.iter().map(|job| run_job(config, job)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        // collect() keeps job order, so output is independent of scheduling
        pool.install(|| jobs.par_iter().map(|job| run_job(config, job)).collect())
    };

    let mut outcome = ProtocolOutcome::default();
    let mut per_pair: Vec<(Algorithm, BenchmarkId, Vec<f64>, usize)> = Vec::new();
    for (job, result) in jobs.iter().zip(results) {
        if job.run == 0 {
            per_pair.push((job.algorithm, job.benchmark, Vec::new(), 0));
        }
        let slot = per_pair.last_mut().expect("run 0 opens each pair");
        match result {
            Ok(report) => {
                slot.2.push(final_fitness(&report));
                outcome.reports.push(report);
            }
            Err(failure) => {
                slot.3 += 1;
                outcome.failures.push(FailureRecord {
                    algorithm: job.algorithm,
                    benchmark: job.benchmark,
                    run: job.run,
                    seed: job.seed,
                    message: failure.to_string(),
                });
                outcome.partial_traces.push(failure.trace);
            }
        }
    }

    for (algorithm, benchmark, finals, failed) in per_pair {
        let (ave, std) = aggregate(&finals).unwrap_or((f64::NAN, f64::NAN));
        outcome.rows.push(AggregateRow {
            algorithm,
            benchmark,
            ave,
            std,
            runs: finals.len(),
            failed,
            degenerate: finals.len() < 2,
        });
    }
    Ok(outcome)
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const TRACE_DIR: &str = "traces";

/// Everything needed to replay a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub config: ProtocolConfig,
    /// Seeds of trial 0..runs, shared by all algorithms.
    pub trial_seeds: Vec<u64>,
    pub std_estimator: String,
    pub degenerate_rows: Vec<String>,
    pub failures: Vec<FailureRecord>,
    pub aggregate: String,
    pub traces: Vec<String>,
}

const MANIFEST_FORMAT: &str = "nawoa-bench-manifest";

#[derive(Debug, Clone)]
pub struct EmittedFiles {
    pub aggregate: PathBuf,
    pub traces: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub timings: PathBuf,
}

/// Shortest round-trip representation in scientific notation.
pub fn format_real(v: f64) -> String {
    format!("{v:e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn trace_file_name(algorithm: Algorithm, benchmark: BenchmarkId) -> String {
    format!("{algorithm}_{benchmark}.csv")
}

/// Writes `aggregate.csv`, one trace CSV per (algorithm, benchmark) pair under
/// `traces/`, `timings.csv` and `manifest.json`.
pub fn emit_results(
    outcome: &ProtocolOutcome,
    config: &ProtocolConfig,
    out_dir: &Path,
) -> Result<EmittedFiles, HarnessError> {
    create_dir(out_dir)?;
    let trace_dir = out_dir.join(TRACE_DIR);
    create_dir(&trace_dir)?;

    let mut csv = String::from("algorithm,benchmark,ave,std,runs\n");
    for row in &outcome.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.algorithm,
            row.benchmark,
            format_real(row.ave),
            format_real(row.std),
            row.runs
        ));
    }
    let aggregate_path = out_dir.join(AGGREGATE_FILE);
    write_file(&aggregate_path, &csv)?;

    let mut trace_paths = Vec::new();
    let mut trace_names = Vec::new();
    for row in &outcome.rows {
        let columns = pair_traces(outcome, config, row.algorithm, row.benchmark);
        let mut text = String::from("iteration");
        for run in 0..columns.len() {
            text.push_str(&format!(",run_{run}"));
        }
        text.push('\n');
        for t in 0..=config.iterations {
            text.push_str(&t.to_string());
            for column in &columns {
                text.push(',');
                if let Some(v) = column.get(t) {
                    text.push_str(&format_real(*v));
                }
            }
            text.push('\n');
        }
        let name = trace_file_name(row.algorithm, row.benchmark);
        let path = trace_dir.join(&name);
        write_file(&path, &text)?;
        trace_paths.push(path);
        trace_names.push(format!("{TRACE_DIR}/{name}"));
    }

    let mut timings = String::from("algorithm,benchmark,seed,wall_time_s,evaluations\n");
    for r in &outcome.reports {
        timings.push_str(&format!(
            "{},{},{},{},{}\n",
            r.algorithm,
            r.benchmark,
            r.seed,
            r.wall_time.as_secs_f64(),
            r.evaluations
        ));
    }
    let timings_path = out_dir.join(TIMINGS_FILE);
    write_file(&timings_path, &timings)?;

    let manifest = Manifest {
        format: MANIFEST_FORMAT.to_string(),
        version: 1,
        config: config.clone(),
        trial_seeds: (0..config.runs)
            .map(|i| trial_seed(config.seed, i))
            .collect(),
        std_estimator: "sample (n-1 denominator)".to_string(),
        degenerate_rows: outcome
            .rows
            .iter()
            .filter(|r| r.degenerate)
            .map(|r| format!("{}/{}", r.algorithm, r.benchmark))
            .collect(),
        failures: outcome.failures.clone(),
        aggregate: AGGREGATE_FILE.to_string(),
        traces: trace_names,
    };
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|source| HarnessError::Json {
        path: manifest_path.clone(),
        source,
    })?;
    write_file(&manifest_path, &(json + "\n"))?;

    Ok(EmittedFiles {
        aggregate: aggregate_path,
        traces: trace_paths,
        manifest: manifest_path,
        timings: timings_path,
    })
}

/// Traces of one pair indexed by run; failed runs contribute their partial trace.
fn pair_traces(
    outcome: &ProtocolOutcome,
    config: &ProtocolConfig,
    algorithm: Algorithm,
    benchmark: BenchmarkId,
) -> Vec<Vec<f64>> {
    let mut columns = vec![Vec::new(); config.runs];
    let (alg, bench) = (algorithm.name(), benchmark.to_string());
    for r in outcome
        .reports
        .iter()
        .filter(|r| r.algorithm == alg && r.benchmark == bench)
    {
        let run = r.seed.wrapping_sub(config.seed) as usize;
        if let Some(col) = columns.get_mut(run) {
            *col = r.trace.clone();
        }
    }
    for (f, trace) in outcome.failures.iter().zip(&outcome.partial_traces) {
        if f.algorithm == algorithm && f.benchmark == benchmark {
            columns[f.run] = trace.clone();
        }
    }
    columns
}

pub fn load_manifest(path: &Path) -> Result<Manifest, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if manifest.format != MANIFEST_FORMAT {
        return Err(HarnessError::Config(format!(
            "{} is not a bench manifest (format `{}`)",
            path.display(),
            manifest.format
        )));
    }
    Ok(manifest)
}

/// Re-runs the campaign recorded in `manifest_path` and writes it to `out_dir`.
pub fn replay(
    manifest_path: &Path,
    out_dir: &Path,
) -> Result<(ProtocolOutcome, EmittedFiles), HarnessError> {
    let manifest = load_manifest(manifest_path)?;
    let outcome = run_protocol(&manifest.config)?;
    let files = emit_results(&outcome, &manifest.config, out_dir)?;
    Ok((outcome, files))
}
