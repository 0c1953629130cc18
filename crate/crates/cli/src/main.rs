//! `nawoa` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nawoa::benchmarks::{self, BenchmarkObjective};
use nawoa::extobj::{spawn_evaluator, ExternalObjectiveDescriptor};
use nawoa::harness::{
    self, format_real, parse_algorithm_list, HarnessError, ProtocolConfig, TrialReport,
};
use nawoa::{Algorithm, InitMode, Objective, ObjectiveSpec, SearchSpace};
use serde::Serialize;

use crate::config::{load_config, OptimizeConfig, RunManifest, TuneConfig, RUN_MANIFEST_FORMAT};

#[derive(Parser)]
#[command(
    name = "nawoa",
    version,
    about = "Whale optimization benchmarks and black-box tuning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated trials over benchmark functions and write aggregate tables.
    Bench(BenchArgs),
    /// Run one trial on one benchmark function.
    Optimize(OptimizeArgs),
    /// Optimize an external evaluator process over a box.
    Tune(TuneArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
    /// Print the benchmark registry as JSON.
    Functions,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON config (or a previous bench manifest); flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma list, e.g. `woa,nawoa`.
    #[arg(long)]
    algorithms: Option<String>,
    /// Ranges and lists, e.g. `F1-F23` or `F1,F9`.
    #[arg(long)]
    functions: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Benchmark id, e.g. `F16`.
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    algorithm: Option<String>,
    /// `good-nodes` or `random`; defaults to the algorithm's own choice.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluator executable.
    #[arg(long)]
    command: Option<PathBuf>,
    /// Lower bounds, comma separated (one value is broadcast with `--dim`).
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Per-evaluation timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    max_restarts: Option<u32>,
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Arguments passed to the evaluator (after `--`).
    #[arg(last = true)]
    args: Vec<String>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value = "replay")]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(m) => Failure::Usage(m),
            other => Failure::Runtime(other.into()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage<T>(message: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(message.into()))
}

fn parse_with<T>(value: &str, f: impl FnOnce(&str) -> Result<T, String>) -> CliResult<T> {
    f(value).map_err(Failure::Usage)
}

fn parse_reals(flag: &str, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Usage(format!("{flag}: `{s}`: {e}")))
        })
        .collect()
}

fn single_algorithm(text: &str) -> CliResult<Algorithm> {
    text.parse().map_err(Failure::Usage)
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult {
    let text = serde_json::to_string_pretty(value).context("serializing output")?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_trace(path: &Path, trace: &[f64]) -> CliResult {
    let mut text = String::from("iteration,best\n");
    for (t, v) in trace.iter().enumerate() {
        text.push_str(&format!("{t},{}\n", format_real(*v)));
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn create_out(out: &Path) -> CliResult {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    let mut cfg: ProtocolConfig = match &args.config {
        Some(path) => load_config(path).map_err(Failure::Usage)?,
        None => ProtocolConfig::default(),
    };
    if let Some(a) = &args.algorithms {
        cfg.algorithms = parse_with(a, parse_algorithm_list)?;
    }
    if let Some(f) = &args.functions {
        cfg.functions = parse_with(f, benchmarks::parse_id_list)?;
    }
    cfg.runs = args.runs.unwrap_or(cfg.runs);
    cfg.population = args.pop.unwrap_or(cfg.population);
    cfg.iterations = args.iters.unwrap_or(cfg.iterations);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.workers = args.workers.unwrap_or(cfg.workers);
    cfg.validate()?;
    run_bench(&cfg, &args.out)
}

fn run_bench(cfg: &ProtocolConfig, out: &Path) -> CliResult {
    let outcome = harness::run_protocol(cfg)?;
    let files = harness::emit_results(&outcome, cfg, out)?;
    println!(
        "{:<9} {:<5} {:>24} {:>24}",
        "algorithm", "bench", "ave", "std"
    );
    for row in &outcome.rows {
        println!(
            "{:<9} {:<5} {:>24} {:>24}",
            row.algorithm.name(),
            row.benchmark,
            format_real(row.ave),
            format_real(row.std)
        );
    }
    if !outcome.failures.is_empty() {
        eprintln!(
            "warning: {} trial(s) failed; see the manifest",
            outcome.failures.len()
        );
    }
    eprintln!("wrote {}", files.manifest.display());
    Ok(())
}

fn resolve_init(algorithm: Algorithm, init: Option<InitMode>) -> InitMode {
    init.unwrap_or_else(|| algorithm.default_init())
}

fn cmd_optimize(args: OptimizeArgs) -> CliResult {
    let mut cfg: OptimizeConfig = match &args.config {
        Some(path) => load_config(path).map_err(Failure::Usage)?,
        None => OptimizeConfig::default(),
    };
    if let Some(f) = &args.function {
        cfg.function = Some(parse_with(f, str::parse)?);
    }
    if let Some(a) = &args.algorithm {
        cfg.algorithm = single_algorithm(a)?;
    }
    if let Some(i) = &args.init {
        cfg.init = Some(parse_with(i, str::parse)?);
    }
    cfg.population = args.pop.unwrap_or(cfg.population);
    cfg.iterations = args.iters.unwrap_or(cfg.iterations);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    run_optimize(cfg, &args.out)
}

fn run_optimize(mut cfg: OptimizeConfig, out: &Path) -> CliResult {
    let Some(function) = cfg.function else {
        return usage("--function is required (e.g. --function F16)");
    };
    if cfg.population < 2 {
        return usage("population must be at least 2");
    }
    cfg.init = Some(resolve_init(cfg.algorithm, cfg.init));
    let mut objective = BenchmarkObjective::spec(function, cfg.seed);
    let report = run_trial(
        &mut objective,
        cfg.algorithm,
        cfg.population,
        cfg.iterations,
        cfg.seed,
        cfg.init,
    )?;

    println!("function    {function}");
    print_report(&report);
    create_out(out)?;
    write_trace(&out.join("trace.csv"), &report.trace)?;
    write_json(
        &out.join("manifest.json"),
        &RunManifest::new("optimize", &cfg, &report),
    )
}

fn run_trial<O: Objective>(
    objective: &mut ObjectiveSpec<O>,
    algorithm: Algorithm,
    population: usize,
    iterations: usize,
    seed: u64,
    init: Option<InitMode>,
) -> CliResult<TrialReport> {
    let init = resolve_init(algorithm, init);
    algorithm
        .optimize(objective, population, iterations, seed, init)
        .map_err(|e| Failure::Runtime(anyhow::Error::new(*e)))
}

fn print_report(report: &TrialReport) {
    let fitness = report
        .final_best
        .fitness()
        .expect("reported best is evaluated");
    let position: Vec<String> = report
        .final_best
        .position()
        .iter()
        .map(|v| format_real(*v))
        .collect();
    println!("algorithm   {}", report.algorithm);
    println!("seed        {}", report.seed);
    println!("fitness     {}", format_real(fitness));
    println!("position    [{}]", position.join(", "));
    println!("evaluations {}", report.evaluations);
}

fn cmd_tune(args: TuneArgs) -> CliResult {
    let mut cfg: TuneConfig = match &args.config {
        Some(path) => load_config(path).map_err(Failure::Usage)?,
        None => TuneConfig::default(),
    };
    if let Some(c) = args.command {
        cfg.command = Some(c);
    }
    if !args.args.is_empty() {
        cfg.args = args.args;
    }
    if let Some(l) = &args.lower {
        cfg.lower = parse_reals("--lower", l)?;
    }
    if let Some(u) = &args.upper {
        cfg.upper = parse_reals("--upper", u)?;
    }
    if let Some(d) = args.dim {
        for (name, bounds) in [("--lower", &mut cfg.lower), ("--upper", &mut cfg.upper)] {
            match bounds.len() {
                1 => *bounds = vec![bounds[0]; d],
                n if n == d => {}
                n => return usage(format!("{name} has {n} values but --dim is {d}")),
            }
        }
    }
    if let Some(a) = &args.algorithm {
        cfg.algorithm = single_algorithm(a)?;
    }
    if let Some(i) = &args.init {
        cfg.init = Some(parse_with(i, str::parse)?);
    }
    cfg.timeout = args.timeout.unwrap_or(cfg.timeout);
    cfg.max_restarts = args.max_restarts.unwrap_or(cfg.max_restarts);
    cfg.population = args.pop.unwrap_or(cfg.population);
    cfg.iterations = args.iters.unwrap_or(cfg.iterations);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    run_tune(cfg, &args.out)
}

#[derive(Serialize)]
struct TuneResult<'a> {
    x: &'a [f64],
    fitness: f64,
    evaluations: u64,
    restarts: u32,
    algorithm: &'a str,
    seed: u64,
}

fn run_tune(mut cfg: TuneConfig, out: &Path) -> CliResult {
    let Some(command) = cfg.command.clone() else {
        return usage("--command is required");
    };
    if !(cfg.timeout.is_finite() && cfg.timeout > 0.0) {
        return usage("--timeout must be a positive number of seconds");
    }
    if cfg.population < 2 {
        return usage("population must be at least 2");
    }
    let space = SearchSpace::new(cfg.lower.clone(), cfg.upper.clone())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    cfg.init = Some(resolve_init(cfg.algorithm, cfg.init));
    let desc = ExternalObjectiveDescriptor::new(command, space)
        .with_args(cfg.args.iter().cloned())
        .with_timeout(Duration::from_secs_f64(cfg.timeout))
        .with_max_restarts(cfg.max_restarts);
    let session = spawn_evaluator(desc).context("starting evaluator")?;
    let mut objective = session.into_spec();
    let report = run_trial(
        &mut objective,
        cfg.algorithm,
        cfg.population,
        cfg.iterations,
        cfg.seed,
        cfg.init,
    )?;

    print_report(&report);
    create_out(out)?;
    let result = TuneResult {
        x: report.final_best.position(),
        fitness: report
            .final_best
            .fitness()
            .expect("reported best is evaluated"),
        evaluations: report.evaluations,
        restarts: objective.evaluator().restarts(),
        algorithm: &report.algorithm,
        seed: report.seed,
    };
    write_json(&out.join("best.json"), &result)?;
    write_trace(&out.join("trace.csv"), &report.trace)?;
    write_json(
        &out.join("manifest.json"),
        &RunManifest::new("tune", &cfg, &report),
    )
}

fn cmd_replay(args: ReplayArgs) -> CliResult {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.manifest.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.manifest.display())))?;
    let config = value.get("config").cloned().unwrap_or_default();
    let bad = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", args.manifest.display()));
    match (value["format"].as_str(), value["command"].as_str()) {
        (Some(RUN_MANIFEST_FORMAT), Some("optimize")) => {
            run_optimize(serde_json::from_value(config).map_err(bad)?, &args.out)
        }
        (Some(RUN_MANIFEST_FORMAT), Some("tune")) => {
            run_tune(serde_json::from_value(config).map_err(bad)?, &args.out)
        }
        _ => {
            let manifest = harness::load_manifest(&args.manifest)?;
            manifest.config.validate()?;
            run_bench(&manifest.config, &args.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Bench(a) => cmd_bench(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Functions => {
            let text = serde_json::to_string_pretty(&benchmarks::registry_json())
                .expect("registry serializes");
            println!("{text}");
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
