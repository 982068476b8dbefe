//! Simulation library for interactive learning from random counter-examples.
//!
//! A concept class is a dense integer matrix: rows are hypotheses, columns are
//! examples. A simulated teacher holds a hidden target row; the learner issues
//! proper equivalence queries (rows of the matrix) and receives, for each wrong
//! query, a counter-example column drawn from a known distribution conditioned
//! on the disagreement region. Three learners are provided:
//!
//! - [`majority`]: queries the consistent row that best agrees with the
//!   column-wise majority vote,
//! - [`randomized`]: samples queries from a Bayesian posterior over consistent
//!   rows, updated in closed form each round,
//! - [`arbitrary`]: picks any consistent row by a pluggable strategy and runs
//!   in the approximate (epsilon/delta) setting.
//!
//! [`instrument`] holds the analysis-side machinery (exact elimination
//! oracles, weight/threshold bookkeeping, closed-form bound calculators),
//! [`datagen`] the instance generators, and [`harness`] the seeded experiment
//! runner behind the `lrc` CLI.

pub mod arbitrary;
pub mod concept;
pub mod datagen;
pub mod harness;
pub mod instrument;
pub mod majority;
pub mod randomized;
pub mod teacher;
pub mod transcript;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum LrcError {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("difference set is empty: the two hypotheses are identical")]
    EmptyDifference,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("generator gave up: could not produce distinct {0} within the attempt budget")]
    GenerationFailed(&'static str),
    #[error("instance too large for exact enumeration: {0}")]
    OracleCap(String),
    #[error("max rounds ({0}) exceeded")]
    MaxRoundsExceeded(usize),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl LrcError {
    /// True for errors caused by bad user input (config, file contents,
    /// infeasible parameters) as opposed to runtime failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            LrcError::InvalidMatrix(_)
                | LrcError::InvalidDistribution(_)
                | LrcError::InvalidConfig(_)
                | LrcError::ShapeMismatch(_)
                | LrcError::GenerationFailed(_)
                | LrcError::OracleCap(_)
        )
    }
}
