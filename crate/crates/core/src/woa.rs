//! Classical WOA: convergence schedules, coefficient draws and the
//! search / encircle / spiral iteration.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{TrialFailure, TrialReport};
use crate::init::{self, InitMode};
use crate::objective::{Objective, ObjectiveSpec};
use crate::rng::{rng_stream, uniform, RngStream};
use crate::swarm::{run_trial, SwarmState};

/// `a = 2·(1 - t/T)`.
pub fn linear_factor(t: usize, max_iterations: usize) -> f64 {
    2.0 * (1.0 - t as f64 / max_iterations as f64)
}

/// Sigmoid schedule `a = 2 - 2 / (1 + e^{-25 (t/T - 0.5)})`: slow, fast, slow.
pub fn sigmoid_factor(t: usize, max_iterations: usize) -> f64 {
    let progress = t as f64 / max_iterations as f64;
    2.0 - 2.0 / (1.0 + (-25.0 * (progress - 0.5)).exp())
}

/// How `|A| >= 1` is decided for a coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MagnitudeGate {
    /// Magnitude of `A[0]`.
    #[default]
    FirstComponent,
    /// Euclidean norm of the whole vector.
    Norm,
}

/// Whether `A` and `C` get an independent draw per dimension or one draw
/// broadcast to every dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientDraw {
    #[default]
    PerComponent,
    Shared,
}

/// Per-individual random coefficients for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct WoaCoefficients {
    /// Convergence factor the draw was made with.
    pub a: f64,
    /// `A = 2a·r1 - a`, componentwise in `[-a, a]`.
    pub a_vec: Vec<f64>,
    /// `C = 2·r2`, componentwise in `[0, 2)`.
    pub c_vec: Vec<f64>,
    /// Phase selector on `[0, 1)`.
    pub p: f64,
    /// Spiral parameter on `[-1, 1)`.
    pub l: f64,
    /// Spiral shape constant.
    pub b: f64,
}

impl WoaCoefficients {
    /// Whether `|A| >= 1` under `gate`.
    pub fn is_large(&self, gate: MagnitudeGate) -> bool {
        match gate {
            MagnitudeGate::FirstComponent => self.a_vec[0].abs() >= 1.0,
            MagnitudeGate::Norm => self.a_vec.iter().map(|v| v * v).sum::<f64>().sqrt() >= 1.0,
        }
    }
}

/// Draw order: `r1` (D values), `r2` (D values), `p`, `l`; with
/// [`CoefficientDraw::Shared`] a single `r1` and `r2` are drawn.
pub fn draw_coefficients(
    a: f64,
    b: f64,
    dim: usize,
    mode: CoefficientDraw,
    rng: &mut RngStream,
) -> WoaCoefficients {
    let (a_vec, c_vec) = match mode {
        CoefficientDraw::PerComponent => {
            let a_vec = (0..dim).map(|_| 2.0 * a * uniform(rng) - a).collect();
            let c_vec = (0..dim).map(|_| 2.0 * uniform(rng)).collect();
            (a_vec, c_vec)
        }
        CoefficientDraw::Shared => {
            let a_s = 2.0 * a * uniform(rng) - a;
            let c_s = 2.0 * uniform(rng);
            (vec![a_s; dim], vec![c_s; dim])
        }
    };
    let p = uniform(rng);
    let l = 2.0 * uniform(rng) - 1.0;
    WoaCoefficients {
        a,
        a_vec,
        c_vec,
        p,
        l,
        b,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WoaParams {
    pub population: usize,
    pub max_iterations: usize,
    pub spiral_b: f64,
    #[serde(default)]
    pub gate: MagnitudeGate,
    #[serde(default)]
    pub draw: CoefficientDraw,
}

impl Default for WoaParams {
    fn default() -> Self {
        Self {
            population: 30,
            max_iterations: 500,
            spiral_b: 1.0,
            gate: MagnitudeGate::FirstComponent,
            draw: CoefficientDraw::PerComponent,
        }
    }
}

impl WoaParams {
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
        Ok(())
    }
}

/// `X' = target - A·|C·target - X|`, componentwise.
fn approach(x: &[f64], target: &[f64], coeffs: &WoaCoefficients) -> Vec<f64> {
    x.iter()
        .zip(target)
        .zip(coeffs.a_vec.iter().zip(&coeffs.c_vec))
        .map(|((xi, ti), (ai, ci))| ti - ai * (ci * ti - xi).abs())
        .collect()
}

/// `X' = |X* - X|·e^{bl}·cos(2πl) + X*`.
fn spiral(x: &[f64], best: &[f64], coeffs: &WoaCoefficients) -> Vec<f64> {
    let factor = (coeffs.b * coeffs.l).exp() * (2.0 * PI * coeffs.l).cos();
    x.iter()
        .zip(best)
        .map(|(xi, bi)| (bi - xi).abs() * factor + bi)
        .collect()
}

/// One classical WOA iteration with the linear schedule.
///
/// New positions are computed from the pre-iteration population, clamped, then
/// evaluated in population order.
pub fn woa_step<O: Objective>(
    state: &mut SwarmState,
    params: &WoaParams,
    objective: &mut ObjectiveSpec<O>,
) -> Result<()> {
    state.ensure_running()?;
    let a = linear_factor(state.iteration(), state.max_iterations());
    let dim = objective.space().dim();
    let n = state.population().len();
    let best = state.best().position().to_vec();
    let snapshot: Vec<Vec<f64>> = state
        .population()
        .iter()
        .map(|i| i.position().to_vec())
        .collect();

    let mut next = Vec::with_capacity(n);
    for x in &snapshot {
        let rng = state.rng_mut();
        let coeffs = draw_coefficients(a, params.spiral_b, dim, params.draw, rng);
        let mut moved = if coeffs.p < 0.5 {
            if coeffs.is_large(params.gate) {
                let partner = rng.random_range(0..n);
                approach(x, &snapshot[partner], &coeffs)
            } else {
                approach(x, &best, &coeffs)
            }
        } else {
            spiral(x, &best, &coeffs)
        };
        objective.space().clamp_in_place(&mut moved);
        next.push(moved);
    }
    state.commit(next, objective)
}

/// Full WOA trial.
pub fn optimize<O: Objective>(
    objective: &mut ObjectiveSpec<O>,
    params: &WoaParams,
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
                "woa",
                objective.label(),
                seed,
                error,
            ))
        }
    };
    run_trial(
        "woa",
        objective,
        population,
        params.max_iterations,
        seed,
        rng,
        |state, obj| woa_step(state, params, obj),
    )
}
