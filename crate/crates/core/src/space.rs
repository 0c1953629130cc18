//! The feasible box and the individuals that live in it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned search box. `lower[i] < upper[i]` for every dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawSpace> for SearchSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        SearchSpace::new(raw.lower, raw.upper)
    }
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidSpace(format!(
                "{} lower bounds but {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidSpace(format!(
                    "dimension {i}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lower, upper]` on every one of `dim` axes.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn check_dim(&self, actual: usize) -> Result<()> {
        if actual == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual,
            })
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Saturates every component at the bound it violates.
    pub fn clamp(&self, position: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(position.len())?;
        let mut out = position.to_vec();
        self.clamp_in_place(&mut out);
        Ok(out)
    }

    /// NaN components are sent to the lower bound.
    pub(crate) fn clamp_in_place(&self, position: &mut [f64]) {
        for (v, (lo, hi)) in position.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = if v.is_nan() { *lo } else { v.clamp(*lo, *hi) };
        }
    }
}

/// One whale: a position and, once evaluated, its fitness.
///
/// Writing a new position drops the cached fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    position: Vec<f64>,
    fitness: Option<f64>,
}

impl Individual {
    pub fn new(position: Vec<f64>) -> Self {
        Self {
            position,
            fitness: None,
        }
    }

    pub(crate) fn evaluated(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            position,
            fitness: Some(fitness),
        }
    }

    pub fn position(&self) -> &[f64] {
        &self.position
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn set_position(&mut self, position: Vec<f64>) {
        self.position = position;
        self.fitness = None;
    }

    pub fn into_position(self) -> Vec<f64> {
        self.position
    }
}
