//! Arbitrary learner for the approximate setting: pick any consistent row by
//! a pluggable strategy, query, eliminate.

use crate::concept::{
    eliminate, ConsistentSet, ExampleDistribution, HypothesisMatrix, RngStream,
};
use crate::teacher::{epsilon_bad, Teacher, TeacherMode, TeacherResponse};
use crate::transcript::{RoundRecord, Transcript};
use crate::LrcError;

/// How the learner picks its next query from the consistent set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// Smallest surviving row index.
    First,
    /// Row at position `len / 2` of the ascending ordering.
    Middle,
    /// Largest surviving row index.
    Last,
    /// Uniform over the consistent set (seeded).
    Random,
    /// Row at position `min(k, len - 1)`.
    FixedRank(usize),
}

impl SelectionStrategy {
    /// Parses `first | middle | last | random | rank:<k>`.
    pub fn parse(text: &str) -> Result<Self, LrcError> {
        match text.trim() {
            "first" => Ok(SelectionStrategy::First),
            "middle" => Ok(SelectionStrategy::Middle),
            "last" => Ok(SelectionStrategy::Last),
            "random" => Ok(SelectionStrategy::Random),
            other => {
                if let Some(k) = other.strip_prefix("rank:") {
                    let k = k.parse::<usize>().map_err(|e| {
                        LrcError::InvalidConfig(format!("bad rank in strategy: {e}"))
                    })?;
                    Ok(SelectionStrategy::FixedRank(k))
                } else {
                    Err(LrcError::InvalidConfig(format!("unknown strategy '{other}'")))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            SelectionStrategy::First => "first".into(),
            SelectionStrategy::Middle => "middle".into(),
            SelectionStrategy::Last => "last".into(),
            SelectionStrategy::Random => "random".into(),
            SelectionStrategy::FixedRank(k) => format!("rank:{k}"),
        }
    }
}

/// Picks a row from the non-empty consistent set.
pub fn select(s: &ConsistentSet, strategy: SelectionStrategy, rng: &mut RngStream) -> usize {
    assert!(!s.is_empty(), "selection from an empty consistent set");
    let v = s.as_slice();
    match strategy {
        SelectionStrategy::First => v[0],
        SelectionStrategy::Middle => v[v.len() / 2],
        SelectionStrategy::Last => v[v.len() - 1],
        SelectionStrategy::Random => v[rng.gen_index(v.len())],
        SelectionStrategy::FixedRank(k) => v[k.min(v.len() - 1)],
    }
}

/// Runs the arbitrary learner against an approximate teacher.
///
/// Ends when the teacher accepts a query, or when no consistent row is
/// epsilon-bad any more (then the next pick would be accepted regardless of
/// strategy, so the run stops and records it as accepted).
pub fn run_arbitrary(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    epsilon: f64,
    delta: f64,
    strategy: SelectionStrategy,
    target: usize,
    rng: &mut RngStream,
    max_rounds: usize,
) -> Result<Transcript, LrcError> {
    let teacher = Teacher::new(h, p, target, TeacherMode::Pac { epsilon, delta })?;
    let mut s = ConsistentSet::full(h.n_rows());
    let mut records = Vec::new();
    for _ in 0..max_rounds {
        if !any_epsilon_bad(h, p, &s, target, epsilon) {
            let accepted = select(&s, strategy, rng);
            debug_assert!(matches!(
                teacher.respond(accepted, &mut rng.clone()),
                TeacherResponse::Accepted
            ));
            return Ok(Transcript { target, accepted, records });
        }
        let query = select(&s, strategy, rng);
        match teacher.respond(query, rng) {
            TeacherResponse::Accepted => {
                return Ok(Transcript { target, accepted: query, records });
            }
            TeacherResponse::CounterExample(cx) => {
                let before = s.len();
                s = eliminate(&s, h, &cx);
                records.push(RoundRecord {
                    query,
                    counter: cx,
                    survivors_before: before,
                    survivors_after: s.len(),
                });
            }
        }
    }
    Err(LrcError::MaxRoundsExceeded(max_rounds))
}

fn any_epsilon_bad(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    s: &ConsistentSet,
    target: usize,
    epsilon: f64,
) -> bool {
    s.iter().any(|r| epsilon_bad(h, p, r, target, epsilon))
}
