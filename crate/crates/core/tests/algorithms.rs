use nawoa::benchmarks::{BenchmarkId, BenchmarkObjective};
use nawoa::woa::{self, CoefficientDraw};
use nawoa::{nawoa as nw, InitMode, NawoaParams, WoaParams};

fn f(n: u8) -> BenchmarkId {
    BenchmarkId::new(n).unwrap()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn woa_with_shared_draws_reaches_deep_sphere_minimum() {
    let params = WoaParams {
        draw: CoefficientDraw::Shared,
        ..WoaParams::new(30, 500)
    };
    let ave = mean((0..30).map(|seed| {
        let mut obj = BenchmarkObjective::spec(f(1), seed);
        let report = woa::optimize(&mut obj, &params, seed, InitMode::Random).unwrap();
        report.final_best.fitness().unwrap()
    }));
    assert!(ave <= 1e-60, "mean final best {ave:e}");
}

#[test]
fn woa_with_componentwise_draws_still_converges() {
    let params = WoaParams::new(30, 500);
    let mut obj = BenchmarkObjective::spec(f(1), 0);
    let report = woa::optimize(&mut obj, &params, 0, InitMode::Random).unwrap();
    assert!(report.final_best.fitness().unwrap() < 1e-10);
    assert_eq!(report.evaluations, 30 * 501);
}

#[test]
fn nawoa_solves_camel_back() {
    let params = NawoaParams::new(30, 500);
    let mut obj = BenchmarkObjective::spec(f(16), 1);
    let report = nw::optimize(&mut obj, &params, 1, InitMode::GoodNodes).unwrap();
    assert!((report.final_best.fitness().unwrap() - -1.0316).abs() < 1e-3);
}

#[test]
fn nawoa_reaches_zero_on_origin_centred_functions() {
    let params = NawoaParams::new(30, 500);
    for n in [1, 2, 9, 11] {
        let mut obj = BenchmarkObjective::spec(f(n), 5);
        let report = nw::optimize(&mut obj, &params, 5, InitMode::GoodNodes).unwrap();
        assert_eq!(report.final_best.fitness().unwrap(), 0.0, "F{n}");
    }
}

#[test]
fn traces_are_monotone_and_sized() {
    let params = NawoaParams::new(12, 40);
    let mut obj = BenchmarkObjective::spec(f(10), 2);
    let report = nw::optimize(&mut obj, &params, 2, InitMode::GoodNodes).unwrap();
    assert_eq!(report.trace.len(), 41);
    assert!(report.trace.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(
        *report.trace.last().unwrap(),
        report.final_best.fitness().unwrap()
    );
}
