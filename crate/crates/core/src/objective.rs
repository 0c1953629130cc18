//! The fitness contract shared by in-process functions and external evaluators.

use crate::error::{Error, EvalError, Result};
use crate::space::SearchSpace;

/// Anything that can score a position. Lower is better once wrapped in an
/// [`ObjectiveSpec`].
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64, EvalError>;
}

/// Adapter for plain closures.
pub struct FnObjective<F>(pub F);

impl<F> Objective for FnObjective<F>
where
    F: FnMut(&[f64]) -> f64,
{
    fn evaluate(&mut self, x: &[f64]) -> Result<f64, EvalError> {
        Ok((self.0)(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Minimize,
    /// Scores are negated before the optimizer sees them.
    Maximize,
}

/// Box, orientation, optional evaluation budget and the evaluator itself.
///
/// All evaluations go through [`ObjectiveSpec::evaluate`], which enforces the
/// dimension, counts calls against the budget and rejects non-finite values.
pub struct ObjectiveSpec<O> {
    space: SearchSpace,
    direction: Direction,
    budget: Option<u64>,
    evaluations: u64,
    label: String,
    evaluator: O,
}

impl<O: Objective> ObjectiveSpec<O> {
    pub fn new(space: SearchSpace, evaluator: O) -> Self {
        Self {
            space,
            direction: Direction::Minimize,
            budget: None,
            evaluations: 0,
            label: String::from("objective"),
            evaluator,
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_budget(mut self, max_evaluations: u64) -> Self {
        self.budget = Some(max_evaluations);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn evaluator(&self) -> &O {
        &self.evaluator
    }

    pub fn evaluator_mut(&mut self) -> &mut O {
        &mut self.evaluator
    }

    pub fn into_evaluator(self) -> O {
        self.evaluator
    }

    /// Minimization-oriented fitness of `x`.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.space.check_dim(x.len())?;
        let fail = |source| Error::Evaluation {
            position: x.to_vec(),
            source,
        };
        if let Some(budget) = self.budget {
            if self.evaluations >= budget {
                return Err(fail(EvalError::BudgetExhausted(budget)));
            }
        }
        self.evaluations += 1;
        let raw = self.evaluator.evaluate(x).map_err(fail)?;
        if !raw.is_finite() {
            return Err(fail(EvalError::NonFinite(raw)));
        }
        Ok(match self.direction {
            Direction::Minimize => raw,
            Direction::Maximize => -raw,
        })
    }
}
