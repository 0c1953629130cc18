//! Mutable optimizer state and the generic trial loop shared by WOA and NAWOA.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::harness::{TrialFailure, TrialReport};
use crate::objective::{Objective, ObjectiveSpec};
use crate::rng::RngStream;
use crate::space::Individual;

/// Population, Leader, iteration counter and the trial's random stream.
///
/// Invariant: `best` is at least as fit as every evaluated member, and it only
/// ever improves.
#[derive(Debug, Clone)]
pub struct SwarmState {
    population: Vec<Individual>,
    best: Individual,
    iteration: usize,
    max_iterations: usize,
    rng: RngStream,
}

impl SwarmState {
    /// Evaluates `population` in order and picks the Leader.
    pub fn initialize<O: Objective>(
        population: Vec<Individual>,
        max_iterations: usize,
        rng: RngStream,
        objective: &mut ObjectiveSpec<O>,
    ) -> Result<Self> {
        if population.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "population size must be at least 2, got {}",
                population.len()
            )));
        }
        let positions = population
            .into_iter()
            .map(Individual::into_position)
            .collect();
        let population = evaluate_all(positions, objective)?;
        let best = leader(&population).clone();
        Ok(Self {
            population,
            best,
            iteration: 0,
            max_iterations,
            rng,
        })
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn best(&self) -> &Individual {
        &self.best
    }

    pub fn best_fitness(&self) -> f64 {
        self.best.fitness().expect("leader is always evaluated")
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn is_finished(&self) -> bool {
        self.iteration >= self.max_iterations
    }

    pub(crate) fn rng_mut(&mut self) -> &mut RngStream {
        &mut self.rng
    }

    pub(crate) fn ensure_running(&self) -> Result<()> {
        if self.is_finished() {
            Err(Error::InvalidParameter(format!(
                "swarm already ran its {} iterations",
                self.max_iterations
            )))
        } else {
            Ok(())
        }
    }

    /// Installs a full generation of (already clamped) positions: evaluates them
    /// in population order, refreshes the Leader once and advances `t`.
    ///
    /// On an evaluation error the state is left untouched.
    pub(crate) fn commit<O: Objective>(
        &mut self,
        positions: Vec<Vec<f64>>,
        objective: &mut ObjectiveSpec<O>,
    ) -> Result<()> {
        debug_assert_eq!(positions.len(), self.population.len());
        self.population = evaluate_all(positions, objective)?;
        let candidate = leader(&self.population);
        if candidate.fitness() < self.best.fitness() {
            self.best = candidate.clone();
        }
        self.iteration += 1;
        Ok(())
    }
}

fn evaluate_all<O: Objective>(
    positions: Vec<Vec<f64>>,
    objective: &mut ObjectiveSpec<O>,
) -> Result<Vec<Individual>> {
    positions
        .into_iter()
        .map(|x| {
            let f = objective.evaluate(&x)?;
            Ok(Individual::evaluated(x, f))
        })
        .collect()
}

/// First member with the lowest fitness; ties keep the earlier index.
fn leader(population: &[Individual]) -> &Individual {
    population
        .iter()
        .reduce(|best, ind| {
            if ind.fitness() < best.fitness() {
                ind
            } else {
                best
            }
        })
        .expect("population is non-empty")
}

/// Initializes, then runs `step` until the swarm is finished, recording the
/// best-so-far fitness after initialization and after every iteration.
pub(crate) fn run_trial<O, F>(
    algorithm: &str,
    objective: &mut ObjectiveSpec<O>,
    population: Vec<Individual>,
    max_iterations: usize,
    seed: u64,
    rng: RngStream,
    mut step: F,
) -> Result<TrialReport, Box<TrialFailure>>
where
    O: Objective,
    F: FnMut(&mut SwarmState, &mut ObjectiveSpec<O>) -> Result<()>,
{
    let started = Instant::now();
    let evaluations_before = objective.evaluations();
    let label = objective.label().to_string();
    let failure = |trace: Vec<f64>, best: Option<Individual>, error: Error| {
        Box::new(TrialFailure {
            algorithm: algorithm.to_string(),
            benchmark: label.clone(),
            seed,
            trace,
            best,
            error,
        })
    };

    let mut state = match SwarmState::initialize(population, max_iterations, rng, objective) {
        Ok(state) => state,
        Err(error) => return Err(failure(Vec::new(), None, error)),
    };
    let mut trace = Vec::with_capacity(max_iterations + 1);
    trace.push(state.best_fitness());

    while !state.is_finished() {
        if let Err(error) = step(&mut state, objective) {
            return Err(failure(trace, Some(state.best().clone()), error));
        }
        trace.push(state.best_fitness());
    }

    Ok(TrialReport {
        algorithm: algorithm.to_string(),
        benchmark: label,
        seed,
        trace,
        final_best: state.best().clone(),
        evaluations: objective.evaluations() - evaluations_before,
        wall_time: started.elapsed(),
    })
}
