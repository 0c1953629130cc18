//! Nonlinear adaptive WOA.
//!
//! Each classical WOA branch is replaced by one of the adaptive strategies,
//! gated by the same `p < 0.5` / `|A| >= 1` tests:
//!
//! | classical branch | strategy                    |
//! |------------------|-----------------------------|
//! | search for prey  | [`leader_followers_step`]   |
//! | encircling prey  | [`dynamic_encircle_step`]   |
//! | spiral update    | [`triangular_hunt_step`]    |
//!
//! The convergence factor follows [`sigmoid_factor`] instead of the linear
//! ramp. Absolute values, distances and the `e^{Z·L}` factor are componentwise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{TrialFailure, TrialReport};
use crate::init::{self, InitMode};
use crate::objective::{Objective, ObjectiveSpec};
use crate::rng::{rng_stream, uniform, RngStream};
use crate::space::Individual;
use crate::swarm::{run_trial, SwarmState};
use crate::woa::{
    draw_coefficients, sigmoid_factor, CoefficientDraw, MagnitudeGate, WoaCoefficients,
};

/// Exponents of the spiral factor are capped here so the factor stays finite;
/// the result is clamped to the box afterwards anyway.
const MAX_EXPONENT: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NawoaParams {
    pub population: usize,
    pub max_iterations: usize,
    /// Spiral coefficient `k` of the flight step size.
    pub spiral_k: f64,
    /// Spiral factor `b`, carried in the coefficient draws.
    pub spiral_b: f64,
    #[serde(default)]
    pub gate: MagnitudeGate,
    #[serde(default)]
    pub draw: CoefficientDraw,
}

impl Default for NawoaParams {
    fn default() -> Self {
        Self {
            population: 30,
            max_iterations: 500,
            spiral_k: 1.0,
            spiral_b: 1.0,
            gate: MagnitudeGate::FirstComponent,
            draw: CoefficientDraw::PerComponent,
        }
    }
}

impl NawoaParams {
    pub fn new(population: usize, max_iterations: usize) -> Self {
        Self {
            population,
            max_iterations,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidParameter(format!(
                "population size must be at least 2, got {}",
                self.population
            )));
        }
        if !self.spiral_k.is_finite() || !self.spiral_b.is_finite() {
            return Err(Error::InvalidParameter(
                "spiral coefficients must be finite".into(),
            ));
        }
        Ok(())
    }
}

fn progress(t: usize, max_iterations: usize) -> f64 {
    if max_iterations == 0 {
        1.0
    } else {
        t as f64 / max_iterations as f64
    }
}

fn spiral_factor(exponent: f64, l: f64) -> f64 {
    exponent.min(MAX_EXPONENT).exp() * (2.0 * PI * l).cos()
}

/// Componentwise mean of the population positions.
pub fn mean_position(population: &[Individual]) -> Result<Vec<f64>> {
    let first = population.first().ok_or(Error::EmptyPopulation)?;
    let mut sum = vec![0.0; first.position().len()];
    for ind in population {
        if ind.position().len() != sum.len() {
            return Err(Error::DimensionMismatch {
                expected: sum.len(),
                actual: ind.position().len(),
            });
        }
        for (s, v) in sum.iter_mut().zip(ind.position()) {
            *s += v;
        }
    }
    let n = population.len() as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}

/// Leader–followers foraging: `(1 - t/T)·X* + |X_R - X*|`.
///
/// The update does not involve the moving individual's own position, so every
/// whale taking this branch in an iteration lands on the same point.
pub fn leader_followers_step(
    best: &[f64],
    mean: &[f64],
    t: usize,
    max_iterations: usize,
) -> Vec<f64> {
    let shrink = 1.0 - progress(t, max_iterations);
    best.iter()
        .zip(mean)
        .map(|(b, m)| shrink * b + (m - b).abs())
        .collect()
}

/// Spiral flight step size `Z = e^{k·cos(π(1 - t/T))}`.
pub fn spiral_step_size(t: usize, max_iterations: usize, k: f64) -> f64 {
    (k * (PI * (1.0 - progress(t, max_iterations))).cos()).exp()
}

/// `D = |C·X* - X|`.
fn leader_distance(x: &[f64], best: &[f64], coeffs: &WoaCoefficients) -> Vec<f64> {
    x.iter()
        .zip(best)
        .zip(&coeffs.c_vec)
        .map(|((xi, bi), ci)| (ci * bi - xi).abs())
        .collect()
}

/// Dynamic encircling with an explicit `L` on `[-1, 1]`:
/// `X* + e^{Z·L}·cos(2πL)·|A·D|`.
pub fn encircle_position(
    x: &[f64],
    best: &[f64],
    coeffs: &WoaCoefficients,
    z: f64,
    l: f64,
) -> Vec<f64> {
    let factor = spiral_factor(z * l, l);
    leader_distance(x, best, coeffs)
        .iter()
        .zip(best)
        .zip(&coeffs.a_vec)
        .map(|((d, b), a)| b + factor * (a * d).abs())
        .collect()
}

/// Dynamic encircling prey; draws `r` and uses `L = 2r - 1`.
pub fn dynamic_encircle_step(
    x: &[f64],
    best: &[f64],
    coeffs: &WoaCoefficients,
    z: f64,
    rng: &mut RngStream,
) -> Vec<f64> {
    let l = 2.0 * uniform(rng) - 1.0;
    encircle_position(x, best, coeffs, z, l)
}

/// Third side of a triangle from two sides and the angle between them,
/// `sqrt(|L1² + L2² - 2·L1·L2·cos γ|)`.
pub fn triangle_side(l1: f64, l2: f64, cos_gamma: f64) -> f64 {
    (l1 * l1 + l2 * l2 - 2.0 * l1 * l2 * cos_gamma).abs().sqrt()
}

/// The random inputs of one triangular-hunting move.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularDraws {
    /// Multiplies the dynamic scaling factor: `r = scale·0.1·(1 - t/T)`.
    pub scale: f64,
    /// Per-component fraction of `D'` used as the second side `L2`.
    pub step: Vec<f64>,
    /// Angle `γ` between the two sides.
    pub angle: f64,
}

impl TriangularDraws {
    pub fn draw(dim: usize, rng: &mut RngStream) -> Self {
        let scale = uniform(rng);
        let step = (0..dim).map(|_| uniform(rng)).collect();
        let angle = 2.0 * PI * uniform(rng);
        Self { scale, step, angle }
    }
}

/// Triangular hunting with explicit draws:
/// `X*·D' + r·L + e^{Z·L}·cos(2πL)·|A·D|` where `D' = L1 = |X* - X|`,
/// `L2 = D'·step`, `L` the triangle side opposite `γ` and `D = |C·X* - X|`.
pub fn triangular_position(
    x: &[f64],
    best: &[f64],
    coeffs: &WoaCoefficients,
    z: f64,
    t: usize,
    max_iterations: usize,
    draws: &TriangularDraws,
) -> Vec<f64> {
    let r = draws.scale * 0.1 * (1.0 - progress(t, max_iterations));
    let cos_gamma = draws.angle.cos();
    let d = leader_distance(x, best, coeffs);
    (0..x.len())
        .map(|i| {
            let d_prime = (best[i] - x[i]).abs();
            let l1 = d_prime;
            let l2 = d_prime * draws.step[i];
            let side = triangle_side(l1, l2, cos_gamma);
            best[i] * d_prime
                + r * side
                + spiral_factor(z * side, side) * (coeffs.a_vec[i] * d[i]).abs()
        })
        .collect()
}

pub fn triangular_hunt_step(
    x: &[f64],
    best: &[f64],
    coeffs: &WoaCoefficients,
    z: f64,
    t: usize,
    max_iterations: usize,
    rng: &mut RngStream,
) -> Vec<f64> {
    let draws = TriangularDraws::draw(x.len(), rng);
    triangular_position(x, best, coeffs, z, t, max_iterations, &draws)
}

/// One NAWOA iteration.
///
/// `X_R`, `Z` and `a` are fixed for the whole iteration and computed from the
/// pre-iteration population. Positions are clamped, then evaluated in order.
pub fn nawoa_step<O: Objective>(
    state: &mut SwarmState,
    params: &NawoaParams,
    objective: &mut ObjectiveSpec<O>,
) -> Result<()> {
    state.ensure_running()?;
    let t = state.iteration();
    let t_max = state.max_iterations();
    let a = sigmoid_factor(t, t_max);
    let z = spiral_step_size(t, t_max, params.spiral_k);
    let dim = objective.space().dim();
    let best = state.best().position().to_vec();
    let mean = mean_position(state.population())?;
    let snapshot: Vec<Vec<f64>> = state
        .population()
        .iter()
        .map(|i| i.position().to_vec())
        .collect();

    let mut next = Vec::with_capacity(snapshot.len());
    for x in &snapshot {
        let rng = state.rng_mut();
        let coeffs = draw_coefficients(a, params.spiral_b, dim, params.draw, rng);
        let mut moved = if coeffs.p < 0.5 {
            if coeffs.is_large(params.gate) {
                leader_followers_step(&best, &mean, t, t_max)
            } else {
                dynamic_encircle_step(x, &best, &coeffs, z, rng)
            }
        } else {
            triangular_hunt_step(x, &best, &coeffs, z, t, t_max, rng)
        };
        objective.space().clamp_in_place(&mut moved);
        next.push(moved);
    }
    state.commit(next, objective)
}

/// Full NAWOA trial: initialize (good nodes by default), evaluate, then
/// `max_iterations` steps.
pub fn optimize<O: Objective>(
    objective: &mut ObjectiveSpec<O>,
    params: &NawoaParams,
    seed: u64,
    init_mode: InitMode,
) -> Result<TrialReport, Box<TrialFailure>> {
    let mut rng = rng_stream(seed);
    let population = params
        .validate()
        .and_then(|_| init::initialize(init_mode, params.population, objective.space(), &mut rng));
    let population = match population {
        Ok(p) => p,
        Err(error) => {
            return Err(TrialFailure::before_start(
                "nawoa",
                objective.label(),
                seed,
                error,
            ))
        }
    };
    run_trial(
        "nawoa",
        objective,
        population,
        params.max_iterations,
        seed,
        rng,
        |state, obj| nawoa_step(state, params, obj),
    )
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use crate::space::SearchSpace;
    use proptest::prelude::*;

    fn coeffs(a_vec: Vec<f64>, c_vec: Vec<f64>) -> WoaCoefficients {
        WoaCoefficients {
            a: 1.0,
            a_vec,
            c_vec,
            p: 0.0,
            l: 0.0,
            b: 1.0,
        }
    }

    fn ind(x: Vec<f64>) -> Individual {
        Individual::new(x)
    }

    #[test]
    fn mean_examples() {
        assert_eq!(
            mean_position(&[ind(vec![0.0, 0.0]), ind(vec![2.0, 2.0])]).unwrap(),
            vec![1.0, 1.0]
        );
        assert_eq!(mean_position(&[ind(vec![3.5])]).unwrap(), vec![3.5]);
        assert_eq!(
            mean_position(&[ind(vec![1.0]), ind(vec![2.0]), ind(vec![6.0])]).unwrap(),
            vec![3.0]
        );
        assert!(matches!(mean_position(&[]), Err(Error::EmptyPopulation)));
    }

    #[test]
    fn leader_followers_examples() {
        let best = [2.0, -2.0];
        assert_eq!(
            leader_followers_step(&best, &[1.0, 1.0], 10, 10),
            vec![1.0, 3.0]
        );
        assert_eq!(leader_followers_step(&best, &best, 0, 10), best.to_vec());
        // 0.5·[2, -2] + |[1, 1] - [2, -2]| = [1, -1] + [1, 3]
        assert_eq!(
            leader_followers_step(&best, &[1.0, 1.0], 5, 10),
            vec![2.0, 2.0]
        );
    }

    #[test]
    fn spiral_step_size_values() {
        assert!((spiral_step_size(0, 100, 1.0) - 0.3678794411714423216).abs() < 1e-12);
        assert!((spiral_step_size(100, 100, 1.0) - std::f64::consts::E).abs() < 1e-12);
        assert!((spiral_step_size(50, 100, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn encircle_collapses_at_zero_l() {
        let c = coeffs(vec![0.5, -0.5], vec![1.0, 1.0]);
        let x = [1.0, 3.0];
        let best = [2.0, 2.0];
        // |A·D| = [0.5, 0.5]
        assert_eq!(encircle_position(&x, &best, &c, 1.7, 0.0), vec![2.5, 2.5]);
    }

    #[test]
    fn encircle_half_turn() {
        let c = coeffs(vec![0.5], vec![1.0]);
        let z = 1.3;
        let got = encircle_position(&[1.0], &[2.0], &c, z, 0.5);
        let want = 2.0 - (z / 2.0).exp() * 0.5;
        assert!((got[0] - want).abs() < 1e-15);
    }

    #[test]
    fn encircle_at_leader_with_unit_c_is_fixed_point() {
        let c = coeffs(vec![0.9, 0.3], vec![1.0, 1.0]);
        let best = [4.0, -1.0];
        for l in [-1.0, -0.3, 0.0, 0.7] {
            assert_eq!(encircle_position(&best, &best, &c, 2.0, l), best.to_vec());
        }
    }

    #[test]
    fn triangle_side_cases() {
        assert_eq!(triangle_side(2.0, 2.0, 1.0), 0.0);
        assert_eq!(triangle_side(3.0, 4.0, 0.0), 5.0);
    }

    #[test]
    fn triangular_at_leader_is_origin() {
        let c = coeffs(vec![0.4, 0.4], vec![1.0, 1.0]);
        let best = [3.0, -7.0];
        let draws = TriangularDraws {
            scale: 0.6,
            step: vec![0.2, 0.9],
            angle: 1.0,
        };
        assert_eq!(
            triangular_position(&best, &best, &c, 1.0, 3, 10, &draws),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn triangular_matches_hand_evaluation() {
        let c = coeffs(vec![0.5], vec![1.5]);
        let (x, best) = ([1.0], [2.0]);
        let draws = TriangularDraws {
            scale: 0.5,
            step: vec![0.5],
            angle: std::f64::consts::FRAC_PI_2,
        };
        let z = 1.2;
        // D' = L1 = 1, L2 = 0.5, cos γ ≈ 0 → L = sqrt(1.25); r = 0.5·0.1·(1 - 2/10)
        // D = |1.5·2 - 1| = 2, |A·D| = 1
        let side = (1.0f64 + 0.25 - 2.0 * 0.5 * draws.angle.cos()).sqrt();
        let r = 0.5 * 0.1 * 0.8;
        let want = 2.0 * 1.0 + r * side + (z * side).exp() * (2.0 * PI * side).cos() * 1.0;
        let got = triangular_position(&x, &best, &c, z, 2, 10, &draws);
        assert!((got[0] - want).abs() < 1e-14, "{} vs {}", got[0], want);
    }

    #[test]
    fn triangular_scaling_term_vanishes_at_end() {
        let c = coeffs(vec![0.0], vec![1.0]);
        let draws = TriangularDraws {
            scale: 1.0,
            step: vec![0.3],
            angle: 2.0,
        };
        // with A = 0 and t = T only X*·D' remains
        let got = triangular_position(&[1.0], &[3.0], &c, 2.0, 10, 10, &draws);
        assert_eq!(got, vec![6.0]);
    }

    #[test]
    fn spiral_factor_is_capped() {
        let c = coeffs(vec![1.0], vec![1.0]);
        let draws = TriangularDraws {
            scale: 0.0,
            step: vec![0.0],
            angle: 0.0,
        };
        let got = triangular_position(&[-400.0], &[400.0], &c, std::f64::consts::E, 0, 10, &draws);
        assert!(got[0].is_finite());
    }

    #[test]
    fn leader_followers_output_shared_by_all_takers() {
        let pop: Vec<Individual> = (0..5).map(|i| ind(vec![i as f64, -(i as f64)])).collect();
        let mean = mean_position(&pop).unwrap();
        let best = pop[2].position().to_vec();
        let first = leader_followers_step(&best, &mean, 3, 7);
        for _ in &pop {
            assert_eq!(leader_followers_step(&best, &mean, 3, 7), first);
        }
    }

    type Sphere = ObjectiveSpec<FnObjective<fn(&[f64]) -> f64>>;

    fn sphere(dim: usize) -> Sphere {
        fn f(x: &[f64]) -> f64 {
            x.iter().map(|v| v * v).sum()
        }
        ObjectiveSpec::new(
            SearchSpace::uniform(dim, -100.0, 100.0).unwrap(),
            FnObjective(f as fn(&[f64]) -> f64),
        )
    }

    #[test]
    fn small_sphere_converges_for_many_seeds() {
        let params = NawoaParams::new(10, 50);
        for seed in 0..20 {
            let r = optimize(&mut sphere(2), &params, seed, InitMode::GoodNodes).unwrap();
            assert!(
                r.final_best.fitness().unwrap() <= 1e-3,
                "seed {seed}: {:?}",
                r.final_best
            );
        }
    }

    #[test]
    fn zero_iterations_reports_initial_best() {
        let r = optimize(
            &mut sphere(2),
            &NawoaParams::new(10, 0),
            1,
            InitMode::GoodNodes,
        )
        .unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.evaluations, 10);
        assert_eq!(r.trace[0], r.final_best.fitness().unwrap());
    }

    #[test]
    fn same_seed_same_report() {
        let params = NawoaParams::new(12, 60);
        let a = optimize(&mut sphere(5), &params, 99, InitMode::GoodNodes).unwrap();
        let b = optimize(&mut sphere(5), &params, 99, InitMode::GoodNodes).unwrap();
        assert_eq!(
            a.trace.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.trace.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(a.final_best, b.final_best);
    }

    #[test]
    fn evaluation_errors_abort_with_partial_trace() {
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let mut obj =
            ObjectiveSpec::new(space, FnObjective(|x: &[f64]| x[0] * x[0])).with_budget(25);
        let err = optimize(&mut obj, &NawoaParams::new(10, 5), 0, InitMode::GoodNodes).unwrap_err();
        assert_eq!(err.trace.len(), 2);
        assert!(err.best.is_some());
        assert!(matches!(err.error, Error::Evaluation { .. }));
    }

    #[test]
    fn population_of_one_is_rejected() {
        let err = optimize(
            &mut sphere(2),
            &NawoaParams::new(1, 5),
            0,
            InitMode::GoodNodes,
        )
        .unwrap_err();
        assert!(err.trace.is_empty());
        assert!(matches!(err.error, Error::InvalidParameter(_)));
    }

    proptest! {
        #[test]
        fn triangle_side_respects_triangle_inequality(l1 in 0.0f64..100.0, frac in 0.0f64..1.0, gamma in 0.0f64..(2.0 * PI)) {
            let l2 = l1 * frac;
            let side = triangle_side(l1, l2, gamma.cos());
            let slack = 1e-9 * (1.0 + l1);
            prop_assert!(side >= (l1 - l2).abs() - slack);
            prop_assert!(side <= l1 + l2 + slack);
        }

        #[test]
        fn every_step_stays_in_box_and_best_never_worsens(seed in 0u64..500) {
            let mut obj = sphere(3);
            let params = NawoaParams::new(6, 15);
            let mut rng = rng_stream(seed);
            let pop = init::init_random(6, obj.space(), &mut rng).unwrap();
            let mut state = SwarmState::initialize(pop, 15, rng, &mut obj).unwrap();
            let mut last = state.best_fitness();
            while !state.is_finished() {
                nawoa_step(&mut state, &params, &mut obj).unwrap();
                prop_assert!(state.population().iter().all(|i| obj.space().contains(i.position())));
                prop_assert!(state.best_fitness() <= last);
                prop_assert!(state.population().iter().all(|i| i.fitness().unwrap() >= state.best_fitness()));
                last = state.best_fitness();
            }
        }
    }
}
