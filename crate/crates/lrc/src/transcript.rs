//! Per-round records of a single learning run.

use crate::concept::CounterExample;

/// One query/counter-example exchange.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    /// Row the learner queried.
    pub query: usize,
    /// Counter-example the teacher returned.
    pub counter: CounterExample,
    /// Consistent-set size before the elimination.
    pub survivors_before: usize,
    /// Consistent-set size after the elimination.
    pub survivors_after: usize,
}

/// Full run: every round that produced a counter-example, plus the accepted
/// hypothesis. The accepting round itself is not recorded, so
/// `counter_examples()` is the paper-sense learning time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub target: usize,
    pub accepted: usize,
    pub records: Vec<RoundRecord>,
}

impl Transcript {
    pub fn counter_examples(&self) -> usize {
        self.records.len()
    }
}
