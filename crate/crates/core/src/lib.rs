//! Whale optimization for black-box minimization.
//!
//! The crate provides the classical Whale Optimization Algorithm (WOA) and the
//! nonlinear adaptive variant (NAWOA): good-nodes initialization, leader–followers
//! foraging, dynamic encircling, triangular hunting and a sigmoid convergence
//! factor. Around the optimizers sit the 23-function classical benchmark suite,
//! a repeated-trial experiment harness and a line-delimited JSON protocol for
//! objectives that live in another process.
//!
//! Everything minimizes. All randomness flows from an explicit seed, so a run is
//! reproducible bit for bit.

pub mod benchmarks;
pub mod error;
pub mod extobj;
pub mod harness;
pub mod init;
pub mod nawoa;
pub mod objective;
pub mod rng;
pub mod space;
pub mod swarm;
pub mod woa;

pub use error::{Error, EvalError, Result};
pub use harness::{Algorithm, TrialReport};
pub use init::InitMode;
pub use nawoa::NawoaParams;
pub use objective::{Direction, FnObjective, Objective, ObjectiveSpec};
pub use space::{Individual, SearchSpace};
pub use woa::WoaParams;
