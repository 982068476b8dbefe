//! Randomized learner: sample queries from the teacher's posterior over
//! consistent rows.
//!
//! The teacher draws the target from a known prior over rows. The learner
//! keeps the posterior of that draw given the transcript so far and samples
//! each query from it. After a counter-example `x_i` against query `h_i`, the
//! posterior over a surviving row `h_j` picks up the likelihood factor
//! `P(x_i) / P(D(h_i, h_j))` (the chance that this particular column would
//! have been drawn had `h_j` been the target) and is renormalized.

use crate::concept::{
    difference_set, eliminate, sample_cdf, ConsistentSet, CounterExample,
    ExampleDistribution, HypothesisMatrix, RngStream, TargetPrior,
};
use crate::teacher::{Teacher, TeacherMode, TeacherResponse};
use crate::transcript::{RoundRecord, Transcript};
use crate::LrcError;

/// Posterior over the rows of a consistent set. Rows are ascending and probs
/// are aligned; zero-mass rows stay in the support but are never sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    rows: Vec<usize>,
    probs: Vec<f64>,
}

/// Learner query paired with the counter-example it drew.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptPair {
    pub hypothesis: usize,
    pub counter: CounterExample,
}

impl Posterior {
    /// Initial posterior: the prior over all rows.
    pub fn from_prior(q: &TargetPrior) -> Self {
        Posterior { rows: (0..q.len()).collect(), probs: q.probs().to_vec() }
    }

    pub fn from_parts(rows: Vec<usize>, probs: Vec<f64>) -> Result<Self, LrcError> {
        if rows.len() != probs.len() {
            return Err(LrcError::ShapeMismatch("posterior rows/probs length".into()));
        }
        Ok(Posterior { rows, probs })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability assigned to a row (zero if outside the support).
    pub fn prob_of(&self, row: usize) -> f64 {
        match self.rows.binary_search(&row) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    /// Inverse-CDF draw over ascending row index, restricted to positive mass.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        self.rows[sample_cdf(&self.probs, rng)]
    }
}

/// One posterior step: keeps the surviving rows, multiplies each prior weight
/// by the counter-example likelihood, renormalizes.
///
/// `survivors` must be the elimination of the prior's support by
/// `pair.counter`. Errors if every surviving weight is zero, which cannot
/// happen when the prior puts positive mass on the true target.
pub fn posterior_update(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    prior: &Posterior,
    pair: &TranscriptPair,
    survivors: &ConsistentSet,
) -> Result<Posterior, LrcError> {
    debug_assert!(
        h.value(pair.hypothesis, pair.counter.column) != pair.counter.target_value,
        "transcript pair must record a real disagreement"
    );
    let entry_sum: f64 = prior.probs.iter().sum();
    if (entry_sum - 1.0).abs() > 1e-6 {
        log::warn!("posterior drifted to sum {entry_sum} before renormalization");
    }
    let px = p.prob(pair.counter.column);
    let mut rows = Vec::with_capacity(survivors.len());
    let mut weights = Vec::with_capacity(survivors.len());
    for r in survivors.iter() {
        let q = prior.prob_of(r);
        let w = if q > 0.0 {
            // r survived, so it agrees with the target value at the drawn
            // column and the query disagrees: the column is in D(query, r).
            let diff = difference_set(h, pair.hypothesis, r);
            q * (px / p.mass(&diff))
        } else {
            0.0
        };
        rows.push(r);
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(LrcError::Internal(
            "posterior update: all surviving weights are zero".into(),
        ));
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(Posterior { rows, probs: weights })
}

/// Runs the randomized learner against an exact teacher.
///
/// The caller draws `target` from the prior first; the run itself only needs
/// the realized row.
pub fn run_randomized(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    q: &TargetPrior,
    target: usize,
    rng: &mut RngStream,
    max_rounds: usize,
) -> Result<Transcript, LrcError> {
    if q.len() != h.n_rows() {
        return Err(LrcError::ShapeMismatch(format!(
            "prior has {} rows, matrix has {}",
            q.len(),
            h.n_rows()
        )));
    }
    let teacher = Teacher::new(h, p, target, TeacherMode::Exact)?;
    let mut s = ConsistentSet::full(h.n_rows());
    let mut posterior = Posterior::from_prior(q);
    let mut records = Vec::new();
    for _ in 0..max_rounds {
        let query = posterior.sample(rng);
        match teacher.respond(query, rng) {
            TeacherResponse::Accepted => {
                return Ok(Transcript { target, accepted: query, records });
            }
            TeacherResponse::CounterExample(cx) => {
                let before = s.len();
                let survivors = eliminate(&s, h, &cx);
                let pair = TranscriptPair { hypothesis: query, counter: cx };
                posterior = posterior_update(h, p, &posterior, &pair, &survivors)?;
                records.push(RoundRecord {
                    query,
                    counter: cx,
                    survivors_before: before,
                    survivors_after: survivors.len(),
                });
                s = survivors;
            }
        }
    }
    Err(LrcError::MaxRoundsExceeded(max_rounds))
}
