//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::E;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use nawoa::benchmarks::{self, BenchmarkId};
use nawoa::extobj::{spawn_evaluator, ExternalObjectiveDescriptor};
use nawoa::harness::{
    emit_results, replay, run_protocol, Algorithm, ProtocolConfig, ProtocolOutcome, TIMINGS_FILE,
};
use nawoa::init::{init_good_nodes, init_random};
use nawoa::nawoa::spiral_step_size;
use nawoa::rng::rng_stream;
use nawoa::woa::sigmoid_factor;
use nawoa::{nawoa as nw, FnObjective, InitMode, NawoaParams, ObjectiveSpec, SearchSpace};

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn ids(list: &[u8]) -> Vec<BenchmarkId> {
    list.iter().map(|&n| BenchmarkId::new(n).unwrap()).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn equation_suite() -> Outcome {
    let t = 500;
    let mid = sigmoid_factor(t / 2, t);
    let start = sigmoid_factor(0, t);
    let end = sigmoid_factor(t, t);
    let z0 = spiral_step_size(0, t, 1.0);
    let z1 = spiral_step_size(t, t, 1.0);
    let pass = mid == 1.0
        && (1.99999..2.0).contains(&start)
        && end > 0.0
        && end <= 1e-5
        && (z0 - E.recip()).abs() <= 1e-12
        && (z1 - E).abs() <= 1e-12;
    Outcome {
        name: "equation unit suite",
        pass,
        detail: format!("a(T/2)={mid:e} a(0)={start:e} a(T)={end:e} Z(0)={z0:e} Z(T)={z1:e}"),
    }
}

fn benchmark_fidelity() -> Outcome {
    let mut misses = Vec::new();
    let mut checked = 0;
    for entry in benchmarks::registry() {
        let Some(x) = entry.optimizer.as_ref() else {
            continue;
        };
        checked += 1;
        let value = benchmarks::evaluate(entry.id, x).unwrap();
        let tol = if entry.id.number() == 8 { 1e-1 } else { 1e-4 };
        let diff = (value - entry.best_value).abs();
        if diff > tol {
            misses.push(format!(
                "{} f={value:.7} listed={} diff={diff:.2e}",
                entry.id, entry.best_value
            ));
        }
    }
    Outcome {
        name: "benchmark fidelity",
        pass: misses.is_empty(),
        detail: if misses.is_empty() {
            format!("{checked} optimizers within tolerance")
        } else {
            format!(
                "{}/{checked} outside tolerance: {}",
                misses.len(),
                misses.join("; ")
            )
        },
    }
}

fn reference_protocol() -> ProtocolOutcome {
    let config = ProtocolConfig {
        algorithms: vec![Algorithm::Woa, Algorithm::Nawoa],
        functions: ids(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 21, 22, 23]),
        runs: 30,
        population: 30,
        iterations: 500,
        seed: 0,
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    run_protocol(&config).expect("protocol runs")
}

fn table_reproduction(outcome: &ProtocolOutcome) -> Outcome {
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    let mut check = |n: u8, ok: &dyn Fn(f64, f64) -> bool| {
        let row = outcome
            .row(Algorithm::Nawoa, BenchmarkId::new(n).unwrap())
            .unwrap();
        summary.push(format!("F{n}={:.4e}±{:.1e}", row.ave, row.std));
        if !ok(row.ave, row.std) || row.failed > 0 {
            failures.push(format!("F{n}"));
        }
    };
    for n in 1..=4 {
        check(n, &|ave, _| ave <= 1e-150);
    }
    check(9, &|ave, _| ave <= 1e-12);
    check(11, &|ave, _| ave <= 1e-12);
    check(10, &|ave, _| ave <= 5e-16);
    check(8, &|ave, _| (ave - -12569.5).abs() <= 0.01 * 12569.5);
    for (n, target) in [(21, -10.153), (22, -10.403), (23, -10.536)] {
        check(n, &move |ave, std| {
            (ave - target).abs() <= 0.5 && std <= 1e-6
        });
    }
    let pass = failures.is_empty();
    Outcome {
        name: "reference results reproduction",
        pass,
        detail: if pass {
            summary.join(" ")
        } else {
            format!("missed {}; {}", failures.join(","), summary.join(" "))
        },
    }
}

fn comparative_ordering(outcome: &ProtocolOutcome) -> Outcome {
    let mut ties = Vec::new();
    let mut losses = Vec::new();
    let mut summary = Vec::new();
    for b in ids(&[1, 2, 3, 4, 5, 6, 7, 12, 13]) {
        let w = median(&outcome.final_bests(Algorithm::Woa, b));
        let n = median(&outcome.final_bests(Algorithm::Nawoa, b));
        summary.push(format!("{b} {n:.3e}/{w:.3e}"));
        if n == w {
            ties.push(b.to_string());
        } else if n > w {
            losses.push(b.to_string());
        }
    }
    let pass = losses.is_empty() && ties.len() <= 1;
    Outcome {
        name: "comparative ordering",
        pass,
        detail: format!(
            "losses [{}] ties [{}]; medians nawoa/woa: {}",
            losses.join(","),
            ties.join(","),
            summary.join(" ")
        ),
    }
}

fn min_pairwise(points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            best = best.min(d);
        }
    }
    best
}

fn initialization_property() -> Outcome {
    let space = SearchSpace::uniform(2, 0.0, 1.0).unwrap();
    let positions = |pop: Vec<nawoa::Individual>| {
        pop.into_iter()
            .map(|i| i.into_position())
            .collect::<Vec<_>>()
    };
    let good = min_pairwise(&positions(init_good_nodes(200, &space).unwrap()));
    let random_mean = (0..30u64)
        .map(|s| {
            min_pairwise(&positions(
                init_random(200, &space, &mut rng_stream(s)).unwrap(),
            ))
        })
        .sum::<f64>()
        / 30.0;
    Outcome {
        name: "initialization property",
        pass: good > random_mean,
        detail: format!("good-nodes min distance {good:.4e}, random mean {random_mean:.4e}"),
    }
}

fn read_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != TIMINGS_FILE {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let (first, second) = (tmp.path().join("first"), tmp.path().join("replay"));
    let config = ProtocolConfig {
        runs: 3,
        population: 10,
        iterations: 60,
        seed: 7,
        workers: 2,
        ..ProtocolConfig::default()
    };
    let outcome = run_protocol(&config).unwrap();
    let files = emit_results(&outcome, &config, &first).unwrap();
    replay(&files.manifest, &second).unwrap();
    let (a, b) = (read_outputs(&first), read_outputs(&second));
    Outcome {
        name: "determinism",
        pass: !a.is_empty() && a == b,
        detail: format!("{} files compared (wall-clock timings excluded)", a.len()),
    }
}

fn oracle_equivalence() -> Outcome {
    let space = SearchSpace::uniform(2, -100.0, 100.0).unwrap();
    let params = NawoaParams::new(10, 50);
    let seed = 42;
    let mut local = ObjectiveSpec::new(
        space.clone(),
        FnObjective(|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>()),
    );
    let local_report = nw::optimize(&mut local, &params, seed, InitMode::GoodNodes).unwrap();

    let desc = ExternalObjectiveDescriptor::new(env!("CARGO_BIN_EXE_sphere-eval"), space)
        .with_timeout(Duration::from_secs(10));
    let mut external = spawn_evaluator(desc).unwrap().into_spec();
    let external_report = nw::optimize(&mut external, &params, seed, InitMode::GoodNodes).unwrap();

    let (fl, fe) = (
        local_report.final_best.fitness().unwrap(),
        external_report.final_best.fitness().unwrap(),
    );
    let position_gap = local_report
        .final_best
        .position()
        .iter()
        .zip(external_report.final_best.position())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Outcome {
        name: "protocol oracle equivalence",
        pass: (fl - fe).abs() <= 1e-12 && position_gap <= 1e-12 && fe < 1e-3,
        detail: format!("in-process {fl:e}, external {fe:e}, max position gap {position_gap:e}"),
    }
}

fn main() -> ExitCode {
    let protocol = reference_protocol();
    let outcomes = [
        equation_suite(),
        benchmark_fidelity(),
        table_reproduction(&protocol),
        comparative_ordering(&protocol),
        initialization_property(),
        determinism(),
        oracle_equivalence(),
    ];
    for o in &outcomes {
        println!(
            "{} {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
