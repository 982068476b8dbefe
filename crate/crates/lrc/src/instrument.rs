//! Analysis-side machinery: per-column weight/threshold bookkeeping, exact
//! elimination oracles, a brute-force Bayes oracle, and closed-form bound
//! calculators.
//!
//! Everything here sees the true target; none of it feeds the learners' hot
//! paths. The exact oracles exist so that the per-round guarantees can be
//! tested by enumeration instead of sampling.

use std::collections::HashMap;

use serde::Serialize;

use crate::concept::{
    conditional_distribution, difference_set, eliminate, ConsistentSet, CounterExample,
    ExampleDistribution, HypothesisMatrix, TargetPrior,
};
use crate::majority::best_majority_hypothesis;
use crate::randomized::{posterior_update, Posterior, TranscriptPair};
use crate::LrcError;

/// Enumeration caps for the exponential-recursion oracles; callers exceeding
/// them get an explicit error instead of a silent slow path.
const ORACLE_MAX_ROWS: usize = 20;
const ORACLE_MAX_COLS: usize = 12;
/// The randomized-rounds recursion has no memoizable state, so it gets a
/// tighter row cap and a node budget.
const RANDOMIZED_ORACLE_MAX_ROWS: usize = 6;
const RANDOMIZED_ORACLE_NODE_BUDGET: u64 = 20_000_000;

// ---------------------------------------------------------------------------
// Weight / threshold bookkeeping
// ---------------------------------------------------------------------------

/// Cumulative per-column counter-example mass.
///
/// Starts all zero; each recorded round adds the full conditional distribution
/// over the learner/target disagreement region, so the total grows by exactly
/// one per round. Columns are accumulated with Neumaier compensation so that
/// the conservation invariant survives tens of thousands of rounds.
#[derive(Debug, Clone)]
pub struct WeightTracker {
    sums: Vec<f64>,
    comps: Vec<f64>,
    rounds: usize,
}

impl WeightTracker {
    pub fn new(n_cols: usize) -> Self {
        WeightTracker { sums: vec![0.0; n_cols], comps: vec![0.0; n_cols], rounds: 0 }
    }

    pub fn n_cols(&self) -> usize {
        self.sums.len()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Current weight of one column.
    pub fn weight(&self, col: usize) -> f64 {
        self.sums[col] + self.comps[col]
    }

    /// All column weights.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.sums.len()).map(|x| self.weight(x)).collect()
    }

    /// Compensated total weight over all columns.
    pub fn total(&self) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for x in 0..self.sums.len() {
            neumaier_add(&mut sum, &mut comp, self.weight(x));
        }
        sum + comp
    }

    /// Adds the expected (distributional) counter-example mass of one round in
    /// which `learner_h` was queried against `target`.
    pub fn record_round(
        &mut self,
        h: &HypothesisMatrix,
        p: &ExampleDistribution,
        learner_h: usize,
        target: usize,
    ) -> Result<(), LrcError> {
        if learner_h == target {
            return Err(LrcError::EmptyDifference);
        }
        let diff = difference_set(h, learner_h, target);
        let cond = conditional_distribution(p, &diff)?;
        for (&col, &prob) in cond.columns().iter().zip(cond.probs()) {
            neumaier_add(&mut self.sums[col], &mut self.comps[col], prob);
        }
        self.rounds += 1;
        Ok(())
    }

    /// Total tracked weight over the columns where `hyp` differs from the
    /// target.
    pub fn hypothesis_weight(
        &self,
        h: &HypothesisMatrix,
        hyp: usize,
        target: usize,
    ) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for col in difference_set(h, hyp, target) {
            neumaier_add(&mut sum, &mut comp, self.weight(col));
        }
        sum + comp
    }
}

fn neumaier_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// Per-column light/heavy thresholds `theta*(x) = ln(|H|/delta) * 2 P(x) / epsilon`.
///
/// The threshold uses the natural log; the reported bound table additionally
/// carries base-2 variants.
#[derive(Debug, Clone)]
pub struct ThresholdTable {
    theta: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub n_hypotheses: usize,
}

impl ThresholdTable {
    pub fn new(
        p: &ExampleDistribution,
        n_hypotheses: usize,
        epsilon: f64,
        delta: f64,
    ) -> Result<Self, LrcError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(LrcError::InvalidConfig(format!("epsilon {epsilon} not in (0,1)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(LrcError::InvalidConfig(format!("delta {delta} not in (0,1)")));
        }
        if n_hypotheses == 0 {
            return Err(LrcError::InvalidConfig("empty hypothesis class".into()));
        }
        let scale = (n_hypotheses as f64 / delta).ln() * 2.0 / epsilon;
        let theta = (0..p.len()).map(|x| scale * p.prob(x)).collect();
        Ok(ThresholdTable { theta, epsilon, delta, n_hypotheses })
    }

    pub fn theta(&self, col: usize) -> f64 {
        self.theta[col]
    }
}

/// Splits columns into (light, heavy): light iff `W(x) <= theta*(x)`.
pub fn light_heavy(
    tracker: &WeightTracker,
    thresholds: &ThresholdTable,
) -> (Vec<usize>, Vec<usize>) {
    let mut light = Vec::new();
    let mut heavy = Vec::new();
    for x in 0..tracker.n_cols() {
        if tracker.weight(x) <= thresholds.theta(x) {
            light.push(x);
        } else {
            heavy.push(x);
        }
    }
    (light, heavy)
}

// ---------------------------------------------------------------------------
// Exact per-round oracles
// ---------------------------------------------------------------------------

/// Fraction of rows in `s` that disagree with `row` at `col`.
pub fn disagreement_fraction(
    h: &HypothesisMatrix,
    s: &ConsistentSet,
    row: usize,
    col: usize,
) -> f64 {
    let v = h.value(row, col);
    let disagree = s.iter().filter(|&r| h.value(r, col) != v).count();
    disagree as f64 / s.len() as f64
}

/// Expected fraction of `s` eliminated when `learner_h` is queried against
/// `target`, by full enumeration of the counter-example distribution.
pub fn expected_elimination_fraction(
    h: &HypothesisMatrix,
    s: &ConsistentSet,
    p: &ExampleDistribution,
    learner_h: usize,
    target: usize,
) -> f64 {
    assert!(learner_h != target, "no counter-example when querying the target");
    assert!(s.contains(learner_h) && s.contains(target));
    let diff = difference_set(h, learner_h, target);
    let cond = conditional_distribution(p, &diff).expect("distinct rows differ somewhere");
    cond.columns()
        .iter()
        .zip(cond.probs())
        .map(|(&x, &px)| px * disagreement_fraction(h, s, target, x))
        .sum()
}

/// Probability that `hyp` is eliminated in a round where `learner_h` was
/// queried against `target`: the conditional mass of the columns where `hyp`
/// disagrees with the target.
pub fn elimination_probability(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    hyp: usize,
    learner_h: usize,
    target: usize,
) -> f64 {
    assert!(learner_h != target);
    let round_diff = difference_set(h, learner_h, target);
    let total = p.mass(&round_diff);
    round_diff
        .iter()
        .filter(|&&x| h.value(hyp, x) != h.value(target, x))
        .map(|&x| p.prob(x) / total)
        .sum()
}

/// Expected eliminated fraction of one randomized round: learner draw and
/// target both from `probs` (aligned with `s`), counter-example from the
/// conditioned distribution. Query == target counts as eliminating everything.
pub fn randomized_round_elimination(
    h: &HypothesisMatrix,
    s: &ConsistentSet,
    p: &ExampleDistribution,
    probs: &[f64],
) -> f64 {
    assert_eq!(probs.len(), s.len());
    let rows = s.as_slice();
    let mut sum = 0.0;
    for (j, &qj) in probs.iter().enumerate() {
        if qj == 0.0 {
            continue;
        }
        for (k, &qk) in probs.iter().enumerate() {
            if qk == 0.0 {
                continue;
            }
            let e = if j == k {
                1.0
            } else {
                expected_elimination_fraction(h, s, p, rows[j], rows[k])
            };
            sum += qj * qk * e;
        }
    }
    sum
}

// ---------------------------------------------------------------------------
// Brute-force Bayes oracle
// ---------------------------------------------------------------------------

/// Direct (non-recursive) posterior over the rows consistent with a
/// transcript: prior times the product of per-round counter-example
/// likelihoods, normalized. Learner selection factors are target-independent
/// and cancel, so only the counter-example likelihoods enter.
pub fn bayes_oracle(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    q: &TargetPrior,
    pairs: &[TranscriptPair],
) -> Result<Posterior, LrcError> {
    if h.n_rows() > ORACLE_MAX_ROWS || h.n_cols() > ORACLE_MAX_COLS {
        return Err(LrcError::OracleCap(format!(
            "bayes_oracle supports up to {ORACLE_MAX_ROWS} rows and {ORACLE_MAX_COLS} columns"
        )));
    }
    if q.len() != h.n_rows() {
        return Err(LrcError::ShapeMismatch("prior length vs matrix rows".into()));
    }
    let mut survivors = ConsistentSet::full(h.n_rows());
    for pair in pairs {
        survivors = eliminate(&survivors, h, &pair.counter);
    }
    if survivors.is_empty() {
        return Err(LrcError::Internal(
            "transcript is inconsistent with every hypothesis".into(),
        ));
    }
    let mut rows = Vec::with_capacity(survivors.len());
    let mut weights = Vec::with_capacity(survivors.len());
    for r in survivors.iter() {
        let mut w = q.prob(r);
        if w > 0.0 {
            for pair in pairs {
                let diff = difference_set(h, pair.hypothesis, r);
                w *= p.prob(pair.counter.column) / p.mass(&diff);
            }
        }
        rows.push(r);
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(LrcError::Internal(
            "transcript has zero likelihood under every surviving hypothesis".into(),
        ));
    }
    for w in &mut weights {
        *w /= total;
    }
    Posterior::from_parts(rows, weights)
}

// ---------------------------------------------------------------------------
// Exact expected-rounds oracles
// ---------------------------------------------------------------------------

/// Exact expected counter-example count of the majority learner for a fixed
/// target, by recursion over the (deterministic) elimination chain.
pub fn exact_expected_rounds_majority(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    target: usize,
) -> Result<f64, LrcError> {
    if h.n_rows() > ORACLE_MAX_ROWS || h.n_cols() > ORACLE_MAX_COLS {
        return Err(LrcError::OracleCap(format!(
            "majority rounds oracle supports up to {ORACLE_MAX_ROWS} rows and \
             {ORACLE_MAX_COLS} columns"
        )));
    }
    let mut memo: HashMap<Vec<usize>, f64> = HashMap::new();
    fn rec(
        h: &HypothesisMatrix,
        p: &ExampleDistribution,
        target: usize,
        s: &ConsistentSet,
        memo: &mut HashMap<Vec<usize>, f64>,
    ) -> f64 {
        if let Some(&v) = memo.get(s.as_slice()) {
            return v;
        }
        let pick = best_majority_hypothesis(h, s, p);
        let value = if pick == target {
            0.0
        } else {
            let diff = difference_set(h, pick, target);
            let cond = conditional_distribution(p, &diff).expect("distinct rows");
            let mut acc = 1.0;
            for (&col, &prob) in cond.columns().iter().zip(cond.probs()) {
                let cx = CounterExample { column: col, target_value: h.value(target, col) };
                let next = eliminate(s, h, &cx);
                acc += prob * rec(h, p, target, &next, memo);
            }
            acc
        };
        memo.insert(s.as_slice().to_vec(), value);
        value
    }
    let full = ConsistentSet::full(h.n_rows());
    Ok(rec(h, p, target, &full, &mut memo))
}

/// Exact expected counter-example count of the randomized learner with the
/// target marginalized over the prior. Exponential in the instance size;
/// only small classes are accepted.
pub fn exact_expected_rounds_randomized(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    q: &TargetPrior,
) -> Result<f64, LrcError> {
    if h.n_rows() > RANDOMIZED_ORACLE_MAX_ROWS || h.n_cols() > ORACLE_MAX_COLS {
        return Err(LrcError::OracleCap(format!(
            "randomized rounds oracle supports up to {RANDOMIZED_ORACLE_MAX_ROWS} rows and \
             {ORACLE_MAX_COLS} columns"
        )));
    }
    if q.len() != h.n_rows() {
        return Err(LrcError::ShapeMismatch("prior length vs matrix rows".into()));
    }

    fn rec(
        h: &HypothesisMatrix,
        p: &ExampleDistribution,
        target: usize,
        s: &ConsistentSet,
        posterior: &Posterior,
        budget: &mut u64,
    ) -> Result<f64, LrcError> {
        let mut expected = 0.0;
        for (&row, &qrow) in posterior.rows().iter().zip(posterior.probs()) {
            if qrow == 0.0 || row == target {
                continue;
            }
            if *budget == 0 {
                return Err(LrcError::OracleCap(
                    "randomized rounds oracle exceeded its node budget".into(),
                ));
            }
            *budget -= 1;
            let diff = difference_set(h, row, target);
            let cond = conditional_distribution(p, &diff)?;
            let mut inner = 0.0;
            for (&col, &prob) in cond.columns().iter().zip(cond.probs()) {
                let cx = CounterExample { column: col, target_value: h.value(target, col) };
                let survivors = eliminate(s, h, &cx);
                let pair = TranscriptPair { hypothesis: row, counter: cx };
                let next = posterior_update(h, p, posterior, &pair, &survivors)?;
                inner += prob * (1.0 + rec(h, p, target, &survivors, &next, budget)?);
            }
            expected += qrow * inner;
        }
        Ok(expected)
    }

    let full = ConsistentSet::full(h.n_rows());
    let mut total = 0.0;
    let mut budget = RANDOMIZED_ORACLE_NODE_BUDGET;
    for target in 0..h.n_rows() {
        let qt = q.prob(target);
        if qt == 0.0 {
            continue;
        }
        let posterior = Posterior::from_prior(q);
        total += qt * rec(h, p, target, &full, &posterior, &mut budget)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Closed-form bounds
// ---------------------------------------------------------------------------

/// Closed-form bound values for a class size and approximation parameters.
///
/// `majority`/`majority_hp` use the log base 4/3 from the per-round quarter
/// guarantee; `randomized` and the reporting variants use base 2;
/// `arbitrary_nat` is the natural-log variant of the arbitrary-learner bound.
#[derive(Debug, Clone, Serialize)]
pub struct BoundTable {
    pub h_size: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Expected rounds of the majority learner: log_{4/3} |H|.
    pub majority: f64,
    /// High-probability majority rounds: log_{4/3} (|H|/delta).
    pub majority_hp: f64,
    /// Expected rounds of the randomized learner: log2 |H|.
    pub randomized: f64,
    /// Arbitrary-learner round bound (4 log2(|H|/delta) + 2)/epsilon + 1.
    pub arbitrary: f64,
    /// Natural-log variant of `arbitrary`.
    pub arbitrary_nat: f64,
    /// Non-interactive sample-complexity comparison: (1/epsilon) log2(|H|/delta).
    pub pac: f64,
}

pub fn log2(x: f64) -> f64 {
    x.log2()
}

pub fn log43(x: f64) -> f64 {
    x.ln() / (4.0f64 / 3.0).ln()
}

pub fn bounds(h_size: usize, epsilon: f64, delta: f64) -> Result<BoundTable, LrcError> {
    if h_size == 0 {
        return Err(LrcError::InvalidConfig("|H| must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LrcError::InvalidConfig(format!("epsilon {epsilon} not in (0,1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LrcError::InvalidConfig(format!("delta {delta} not in (0,1)")));
    }
    let n = h_size as f64;
    Ok(BoundTable {
        h_size,
        epsilon,
        delta,
        majority: log43(n),
        majority_hp: log43(n / delta),
        randomized: log2(n),
        arbitrary: (4.0 * log2(n / delta) + 2.0) / epsilon + 1.0,
        arbitrary_nat: (4.0 * (n / delta).ln() + 2.0) / epsilon + 1.0,
        pac: log2(n / delta) / epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::RngStream;
    use crate::datagen;

    fn matrix(rows: &[&[u32]]) -> HypothesisMatrix {
        HypothesisMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn record_round_single_column_difference() {
        let h = matrix(&[&[0, 1, 0], &[0, 1, 1], &[1, 0, 0]]);
        let p = ExampleDistribution::uniform(3);
        let mut tr = WeightTracker::new(3);
        tr.record_round(&h, &p, 0, 1).unwrap(); // D = {2}
        assert_eq!(tr.weight(2), 1.0);
        assert_eq!(tr.weight(0), 0.0);
    }

    #[test]
    fn record_round_uniform_split() {
        let h = matrix(&[&[0, 0, 0, 0, 7], &[1, 2, 3, 4, 7]]);
        let p = ExampleDistribution::uniform(5);
        let mut tr = WeightTracker::new(5);
        tr.record_round(&h, &p, 0, 1).unwrap(); // D = {0,1,2,3}
        for x in 0..4 {
            assert!((tr.weight(x) - 0.25).abs() < 1e-15);
        }
        assert_eq!(tr.weight(4), 0.0);
    }

    #[test]
    fn total_weight_tracks_round_count() {
        let h = datagen::generate_random(10, 7, 2, 3).unwrap();
        let p = ExampleDistribution::uniform(7);
        let mut tr = WeightTracker::new(7);
        let target = 0;
        let mut rng = RngStream::new(17);
        for k in 1..=2000 {
            let mut learner = rng.gen_index(10);
            if learner == target {
                learner = (learner + 1) % 10;
            }
            tr.record_round(&h, &p, learner, target).unwrap();
            if k % 500 == 0 {
                assert!((tr.total() - k as f64).abs() <= 1e-12, "round {k}: {}", tr.total());
            }
        }
    }

    #[test]
    fn record_round_rejects_target_query() {
        let h = matrix(&[&[0, 1], &[1, 0]]);
        let p = ExampleDistribution::uniform(2);
        let mut tr = WeightTracker::new(2);
        assert!(tr.record_round(&h, &p, 1, 1).is_err());
    }

    #[test]
    fn hypothesis_weight_cases() {
        let h = datagen::generate_random(8, 6, 2, 5).unwrap();
        let p = ExampleDistribution::uniform(6);
        let target = 2;
        let mut tr = WeightTracker::new(6);
        assert_eq!(tr.hypothesis_weight(&h, target, target), 0.0);
        tr.record_round(&h, &p, 5, target).unwrap();
        // The round's own hypothesis owns all of the added mass.
        assert!((tr.hypothesis_weight(&h, 5, target) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_weight_equals_summed_elimination_probabilities() {
        let h = datagen::generate_random(9, 7, 2, 11).unwrap();
        let p = ExampleDistribution::uniform(7);
        let target = 4;
        let mut tr = WeightTracker::new(7);
        let mut rng = RngStream::new(23);
        let mut queried = Vec::new();
        for _ in 0..60 {
            let mut learner = rng.gen_index(9);
            if learner == target {
                learner = (learner + 3) % 9;
            }
            tr.record_round(&h, &p, learner, target).unwrap();
            queried.push(learner);
        }
        for hyp in 0..9 {
            if hyp == target {
                continue;
            }
            let direct: f64 = queried
                .iter()
                .map(|&l| elimination_probability(&h, &p, hyp, l, target))
                .sum();
            let tracked = tr.hypothesis_weight(&h, hyp, target);
            assert!((direct - tracked).abs() <= 1e-12, "hyp {hyp}: {direct} vs {tracked}");
        }
    }

    #[test]
    fn light_heavy_partition() {
        let p = ExampleDistribution::uniform(4);
        let thresholds = ThresholdTable::new(&p, 16, 0.1, 0.1).unwrap();
        let mut tr = WeightTracker::new(4);
        let (light, heavy) = light_heavy(&tr, &thresholds);
        assert_eq!(light, vec![0, 1, 2, 3]);
        assert!(heavy.is_empty());
        // Exactly at the threshold stays light.
        tr.sums[1] = thresholds.theta(1);
        let (light, heavy) = light_heavy(&tr, &thresholds);
        assert!(light.contains(&1) && heavy.is_empty());
        tr.sums[1] = thresholds.theta(1) * (1.0 + 1e-9);
        let (_, heavy) = light_heavy(&tr, &thresholds);
        assert_eq!(heavy, vec![1]);
    }

    #[test]
    fn threshold_formula_value() {
        // |H|=100, delta=0.1, epsilon=0.01, P(x)=0.001:
        // theta = ln(1000) * 2 * 0.001 / 0.01 = ln(1000) * 0.2.
        let p = ExampleDistribution::uniform(1000);
        let t = ThresholdTable::new(&p, 100, 0.01, 0.1).unwrap();
        assert!((t.theta(0) - 1.3815510557964274).abs() < 1e-9);
    }

    #[test]
    fn two_row_elimination_fraction_is_half() {
        let h = matrix(&[&[0, 0, 2], &[1, 0, 3]]);
        let p = ExampleDistribution::uniform(3);
        let s = ConsistentSet::full(2);
        let e = expected_elimination_fraction(&h, &s, &p, 0, 1);
        assert!((e - 0.5).abs() < 1e-15);
        let e2 = expected_elimination_fraction(&h, &s, &p, 1, 0);
        assert!(e + e2 >= 1.0 - 1e-15);
    }

    #[test]
    fn tight_bound_round_one_fraction() {
        let inst = datagen::generate_tight_bound(2).unwrap();
        let p = ExampleDistribution::uniform(5);
        let s = ConsistentSet::full(6);
        let e = expected_elimination_fraction(
            &inst.matrix,
            &s,
            &p,
            inst.best_majority_row,
            inst.target_row,
        );
        assert!((e - (0.25 + 1.0 / 12.0)).abs() < 1e-15, "e = {e}");
        assert!((e - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pairwise_elimination_sums_to_at_least_one() {
        for seed in 0..20 {
            let h = datagen::generate_random(8, 6, 2, 1000 + seed).unwrap();
            let p = ExampleDistribution::uniform(6);
            let s = ConsistentSet::full(8);
            for a in 0..8 {
                for b in (a + 1)..8 {
                    let e1 = expected_elimination_fraction(&h, &s, &p, a, b);
                    let e2 = expected_elimination_fraction(&h, &s, &p, b, a);
                    assert!(e1 + e2 >= 1.0 - 1e-12, "pair ({a},{b}): {e1} + {e2}");
                }
            }
        }
    }

    #[test]
    fn disagreement_fractions_cover_disputed_columns() {
        for seed in 0..10 {
            let h = datagen::generate_random(7, 5, 3, 2000 + seed).unwrap();
            let s = ConsistentSet::full(7);
            for a in 0..7 {
                for b in 0..7 {
                    for x in difference_set(&h, a, b) {
                        let va = disagreement_fraction(&h, &s, a, x);
                        let vb = disagreement_fraction(&h, &s, b, x);
                        assert!(va + vb >= 1.0 - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn bayes_oracle_empty_transcript_returns_prior() {
        let h = datagen::generate_random(6, 4, 2, 9).unwrap();
        let p = ExampleDistribution::uniform(4);
        let q = TargetPrior::new(vec![0.3, 0.1, 0.2, 0.05, 0.05, 0.3]).unwrap();
        let post = bayes_oracle(&h, &p, &q, &[]).unwrap();
        for r in 0..6 {
            assert!((post.prob_of(r) - q.prob(r)).abs() < 1e-15);
        }
    }

    #[test]
    fn bayes_oracle_three_row_hand_computation() {
        let h = matrix(&[&[0, 0], &[1, 0], &[1, 1]]);
        let p = ExampleDistribution::uniform(2);
        let q = TargetPrior::uniform(3);
        let pairs = [TranscriptPair {
            hypothesis: 0,
            counter: CounterExample { column: 0, target_value: 1 },
        }];
        let post = bayes_oracle(&h, &p, &q, &pairs).unwrap();
        assert!((post.prob_of(1) - 2.0 / 3.0).abs() < 1e-12);
        assert!((post.prob_of(2) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bayes_oracle_enforces_caps() {
        let h = datagen::generate_random(21, 5, 2, 1).unwrap();
        let p = ExampleDistribution::uniform(5);
        let q = TargetPrior::uniform(21);
        assert!(matches!(
            bayes_oracle(&h, &p, &q, &[]),
            Err(LrcError::OracleCap(_))
        ));
    }

    #[test]
    fn majority_rounds_oracle_identity_four() {
        let h = datagen::generate_identity(4).unwrap();
        let p = ExampleDistribution::uniform(4);
        assert!((exact_expected_rounds_majority(&h, &p, 0).unwrap() - 1.75).abs() < 1e-12);
        let single = matrix(&[&[0, 1]]);
        let p2 = ExampleDistribution::uniform(2);
        assert_eq!(exact_expected_rounds_majority(&single, &p2, 0).unwrap(), 0.0);
    }

    #[test]
    fn rounds_oracles_enforce_caps() {
        let h = datagen::generate_random(21, 5, 2, 2).unwrap();
        let p = ExampleDistribution::uniform(5);
        assert!(matches!(
            exact_expected_rounds_majority(&h, &p, 0),
            Err(LrcError::OracleCap(_))
        ));
        let h2 = datagen::generate_random(7, 5, 2, 2).unwrap();
        let q = TargetPrior::uniform(7);
        assert!(matches!(
            exact_expected_rounds_randomized(&h2, &p, &q),
            Err(LrcError::OracleCap(_))
        ));
    }

    #[test]
    fn bound_values() {
        let b = bounds(2, 0.1, 0.1).unwrap();
        assert!((b.majority - 2.4094208396532095).abs() < 1e-9);
        let b256 = bounds(256, 0.1, 0.1).unwrap();
        assert_eq!(b256.randomized, 8.0);
        let barb = bounds(1000, 0.1, 0.1).unwrap();
        assert!((barb.arbitrary - 552.5084951819779).abs() < 1e-6);
        let bpac = bounds(10_000, 0.01, 0.1).unwrap();
        assert!((bpac.pac - 1660.9640474436812).abs() < 1e-6);
        assert!(bounds(0, 0.1, 0.1).is_err());
        assert!(bounds(10, 0.0, 0.1).is_err());
        assert!(bounds(10, 0.1, 1.0).is_err());
    }

    #[test]
    fn heavy_columns_never_revert() {
        let h = datagen::generate_random(12, 6, 2, 31).unwrap();
        let p = ExampleDistribution::uniform(6);
        let thresholds = ThresholdTable::new(&p, 12, 0.2, 0.2).unwrap();
        let mut tr = WeightTracker::new(6);
        let mut rng = RngStream::new(13);
        let target = 3;
        let mut ever_heavy = vec![false; 6];
        for _ in 0..400 {
            let mut learner = rng.gen_index(12);
            if learner == target {
                learner = (learner + 1) % 12;
            }
            tr.record_round(&h, &p, learner, target).unwrap();
            let (light, heavy) = light_heavy(&tr, &thresholds);
            for &x in &heavy {
                ever_heavy[x] = true;
            }
            for &x in &light {
                assert!(!ever_heavy[x], "column {x} reverted to light");
            }
        }
        assert!(ever_heavy.iter().any(|&b| b));
    }
}
