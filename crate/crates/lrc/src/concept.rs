//! Concept class, example distribution, target prior, difference sets and the
//! elimination primitive shared by every learner.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::LrcError;

/// Dense concept class: `n` hypothesis rows over `m` example columns.
///
/// Entries are non-negative integers (`u32`); a valid class has no duplicated
/// rows and no duplicated columns. The matrix is immutable after construction
/// and can be shared across concurrent trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisMatrix {
    values: Vec<u32>,
    n: usize,
    m: usize,
    max_value: u32,
}

/// First structural defect found by [`HypothesisMatrix::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateRows { first: usize, second: usize },
    DuplicateColumns { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateRows { first, second } => {
                write!(f, "rows {first} and {second} are identical")
            }
            Violation::DuplicateColumns { first, second } => {
                write!(f, "columns {first} and {second} are identical")
            }
        }
    }
}

impl HypothesisMatrix {
    /// Builds a matrix from row vectors. Rejects empty or ragged input;
    /// duplicate detection is left to [`validate`](Self::validate).
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self, LrcError> {
        if rows.is_empty() {
            return Err(LrcError::InvalidMatrix("no rows".into()));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(LrcError::InvalidMatrix("no columns".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(LrcError::InvalidMatrix(format!(
                    "row {i} has {} columns, expected {m}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        let max_value = values.iter().copied().max().unwrap_or(0);
        Ok(HypothesisMatrix { values, n: rows.len(), m, max_value })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.m
    }

    /// Largest entry in the matrix (used to size dense vote counters).
    pub fn max_value(&self) -> u32 {
        self.max_value
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> u32 {
        self.values[row * self.m + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[u32] {
        &self.values[row * self.m..(row + 1) * self.m]
    }

    /// Checks the no-duplicate-rows / no-duplicate-columns requirement and
    /// reports the first offending pair. Never panics on bad input.
    ///
    /// Rows and columns are hashed once and compared exactly on hash
    /// collision, so this stays O(nm) even at 10^5 x 5*10^3.
    pub fn validate(&self) -> Result<(), Violation> {
        let mut seen_rows: HashMap<u64, Vec<usize>> = HashMap::new();
        for i in 0..self.n {
            let mut h = DefaultHasher::new();
            self.row(i).hash(&mut h);
            let key = h.finish();
            if let Some(prev) = seen_rows.get(&key) {
                for &p in prev {
                    if self.row(p) == self.row(i) {
                        return Err(Violation::DuplicateRows { first: p, second: i });
                    }
                }
            }
            seen_rows.entry(key).or_default().push(i);
        }
        let mut seen_cols: HashMap<u64, Vec<usize>> = HashMap::new();
        for j in 0..self.m {
            let mut h = DefaultHasher::new();
            for i in 0..self.n {
                self.value(i, j).hash(&mut h);
            }
            let key = h.finish();
            if let Some(prev) = seen_cols.get(&key) {
                for &p in prev {
                    if (0..self.n).all(|i| self.value(i, p) == self.value(i, j)) {
                        return Err(Violation::DuplicateColumns { first: p, second: j });
                    }
                }
            }
            seen_cols.entry(key).or_default().push(j);
        }
        Ok(())
    }

    /// Parses a plain comma-separated integer grid, one row per line.
    pub fn parse_csv(text: &str) -> Result<Self, LrcError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<u32>, _> =
                line.split(',').map(|tok| tok.trim().parse::<u32>()).collect();
            rows.push(row.map_err(|e| {
                LrcError::InvalidMatrix(format!("line {}: {e}", lineno + 1))
            })?);
        }
        Self::from_rows(rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn read_csv(path: &Path) -> Result<Self, LrcError> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), LrcError> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Known probability distribution over the example columns.
///
/// Every column must have strictly positive mass and the entries must sum to
/// one within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleDistribution {
    probs: Vec<f64>,
}

impl ExampleDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, LrcError> {
        if probs.is_empty() {
            return Err(LrcError::InvalidDistribution("no columns".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p > 0.0) || !p.is_finite() {
                return Err(LrcError::InvalidDistribution(format!(
                    "column {i} has non-positive probability {p}"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(LrcError::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(ExampleDistribution { probs })
    }

    pub fn uniform(m: usize) -> Self {
        ExampleDistribution { probs: vec![1.0 / m as f64; m] }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    #[inline]
    pub fn prob(&self, col: usize) -> f64 {
        self.probs[col]
    }

    /// Total mass of a set of columns.
    pub fn mass(&self, cols: &[usize]) -> f64 {
        cols.iter().map(|&x| self.probs[x]).sum()
    }

    /// Parses a single line of comma-separated reals.
    pub fn parse_line(text: &str) -> Result<Self, LrcError> {
        let probs: Result<Vec<f64>, _> = text
            .trim()
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        Self::new(probs.map_err(|e| LrcError::InvalidDistribution(e.to_string()))?)
    }

    pub fn to_line(&self) -> String {
        let toks: Vec<String> = self.probs.iter().map(|p| p.to_string()).collect();
        toks.join(",")
    }
}

/// Teacher's prior over hypothesis rows (randomized setting).
///
/// Entries are non-negative and sum to one within 1e-9; zero-mass rows are
/// allowed (they can be eliminated but are never drawn).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPrior {
    probs: Vec<f64>,
}

impl TargetPrior {
    pub fn new(probs: Vec<f64>) -> Result<Self, LrcError> {
        if probs.is_empty() {
            return Err(LrcError::InvalidDistribution("no rows".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(LrcError::InvalidDistribution(format!(
                    "row {i} has negative probability {p}"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(LrcError::InvalidDistribution(format!(
                "prior sums to {sum}, expected 1"
            )));
        }
        if !probs.iter().any(|&p| p > 0.0) {
            return Err(LrcError::InvalidDistribution("prior has no positive entry".into()));
        }
        Ok(TargetPrior { probs })
    }

    pub fn uniform(n: usize) -> Self {
        TargetPrior { probs: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    #[inline]
    pub fn prob(&self, row: usize) -> f64 {
        self.probs[row]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Draws a target row by inverse CDF over ascending row index.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        sample_cdf(&self.probs, rng)
    }

    pub fn parse_line(text: &str) -> Result<Self, LrcError> {
        let probs: Result<Vec<f64>, _> = text
            .trim()
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        Self::new(probs.map_err(|e| LrcError::InvalidDistribution(e.to_string()))?)
    }
}

/// Counter-example revealed by the teacher: a column index and the target
/// row's value there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterExample {
    pub column: usize,
    pub target_value: u32,
}

/// Ascending set of row indices still consistent with every counter-example
/// seen. Per-trial, single-owner state; the matrix itself is never mutated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistentSet {
    indices: Vec<usize>,
}

impl ConsistentSet {
    /// All `n` rows.
    pub fn full(n: usize) -> Self {
        ConsistentSet { indices: (0..n).collect() }
    }

    /// Builds from arbitrary indices; sorts and deduplicates.
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        ConsistentSet { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.indices.binary_search(&row).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }
}

/// Columns on which two rows take different values, ascending.
///
/// Empty exactly when `h1 == h2` on a valid (duplicate-free) matrix.
pub fn difference_set(h: &HypothesisMatrix, h1: usize, h2: usize) -> Vec<usize> {
    assert!(h1 < h.n_rows() && h2 < h.n_rows(), "row index out of range");
    let (a, b) = (h.row(h1), h.row(h2));
    (0..h.n_cols()).filter(|&x| a[x] != b[x]).collect()
}

/// Example distribution conditioned on a disagreement region: probability
/// `P(x)/P(diff)` for each column of the difference set, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    columns: Vec<usize>,
    probs: Vec<f64>,
}

impl ConditionalDistribution {
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_of_column(&self, col: usize) -> f64 {
        match self.columns.binary_search(&col) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    /// Inverse-CDF draw with cumulative order fixed by ascending column
    /// index, so identical seeds give identical columns everywhere.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        self.columns[sample_cdf(&self.probs, rng)]
    }
}

/// Conditions `p` on a non-empty difference set.
pub fn conditional_distribution(
    p: &ExampleDistribution,
    diff: &[usize],
) -> Result<ConditionalDistribution, LrcError> {
    if diff.is_empty() {
        return Err(LrcError::EmptyDifference);
    }
    let total = p.mass(diff);
    let probs: Vec<f64> = diff.iter().map(|&x| p.prob(x) / total).collect();
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    Ok(ConditionalDistribution { columns: diff.to_vec(), probs })
}

/// Keeps exactly the rows of `set` that agree with the counter-example.
/// Idempotent; the target row always survives a valid teacher's response.
pub fn eliminate(
    set: &ConsistentSet,
    h: &HypothesisMatrix,
    cx: &CounterExample,
) -> ConsistentSet {
    assert!(cx.column < h.n_cols(), "column index out of range");
    let indices = set
        .iter()
        .filter(|&r| h.value(r, cx.column) == cx.target_value)
        .collect();
    ConsistentSet { indices }
}

/// Deterministic seeded random stream; identical seeds give identical draw
/// sequences across runs and platforms.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { rng: ChaCha8Rng::seed_from_u64(seed), seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `[0, n)` via widening multiply.
    pub fn gen_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "gen_index of empty range");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

/// Inverse-CDF sample over `probs` (ascending index order); returns the first
/// index whose cumulative mass exceeds the uniform draw. Zero-mass entries
/// are never selected.
pub(crate) fn sample_cdf(probs: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.next_f64();
    let mut cum = 0.0;
    let mut last_positive = None;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = Some(i);
            cum += p;
            if u < cum {
                return i;
            }
        }
    }
    last_positive.expect("sample_cdf: distribution has no positive mass")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen;

    fn matrix(rows: &[&[u32]]) -> HypothesisMatrix {
        HypothesisMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validate_accepts_distinct_grid() {
        assert_eq!(matrix(&[&[0, 1], &[1, 0]]).validate(), Ok(()));
    }

    #[test]
    fn validate_reports_duplicate_rows() {
        assert_eq!(
            matrix(&[&[0, 1], &[0, 1]]).validate(),
            Err(Violation::DuplicateRows { first: 0, second: 1 })
        );
    }

    #[test]
    fn validate_reports_duplicate_columns() {
        assert_eq!(
            matrix(&[&[0, 0], &[1, 1]]).validate(),
            Err(Violation::DuplicateColumns { first: 0, second: 1 })
        );
    }

    #[test]
    fn from_rows_rejects_bad_shapes() {
        assert!(HypothesisMatrix::from_rows(vec![]).is_err());
        assert!(HypothesisMatrix::from_rows(vec![vec![]]).is_err());
        assert!(HypothesisMatrix::from_rows(vec![vec![1], vec![1, 2]]).is_err());
    }

    #[test]
    fn difference_set_cases() {
        let h = matrix(&[&[0, 0, 1], &[0, 1, 1]]);
        assert!(difference_set(&h, 0, 0).is_empty());
        assert_eq!(difference_set(&h, 0, 1), vec![1]);
        let h2 = matrix(&[&[0, 0], &[1, 1]]);
        assert_eq!(difference_set(&h2, 0, 1), vec![0, 1]);
    }

    #[test]
    fn conditional_uniform_symmetry() {
        let p = ExampleDistribution::uniform(4);
        let cond = conditional_distribution(&p, &[0, 2]).unwrap();
        assert_eq!(cond.columns(), &[0, 2]);
        assert!((cond.prob_of_column(0) - 0.5).abs() < 1e-15);
        assert!((cond.prob_of_column(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditional_direct_normalization() {
        let p = ExampleDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let cond = conditional_distribution(&p, &[1, 3]).unwrap();
        assert!((cond.prob_of_column(1) - 1.0 / 3.0).abs() < 1e-12);
        assert!((cond.prob_of_column(3) - 2.0 / 3.0).abs() < 1e-12);
        assert!((cond.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn conditional_on_full_support_is_p() {
        let p = ExampleDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let cond = conditional_distribution(&p, &[0, 1, 2, 3]).unwrap();
        for x in 0..4 {
            assert!((cond.prob_of_column(x) - p.prob(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_rejects_empty_diff() {
        let p = ExampleDistribution::uniform(3);
        assert!(matches!(
            conditional_distribution(&p, &[]),
            Err(LrcError::EmptyDifference)
        ));
    }

    #[test]
    fn eliminate_no_op_when_all_agree() {
        let h = matrix(&[&[1, 0], &[1, 1], &[1, 2]]);
        let s = ConsistentSet::full(3);
        let out = eliminate(&s, &h, &CounterExample { column: 0, target_value: 1 });
        assert_eq!(out, s);
    }

    #[test]
    fn eliminate_identity_to_singleton() {
        let h = datagen::generate_identity(4).unwrap();
        let s = ConsistentSet::full(4);
        for k in 0..4 {
            let out = eliminate(&s, &h, &CounterExample { column: k, target_value: 1 });
            assert_eq!(out.as_slice(), &[k]);
        }
    }

    #[test]
    fn eliminate_tight_bound_counter_example_keeps_half() {
        // Counter-example at column 0 with the target's value 1: of the six
        // two-ones rows exactly the three with a leading 1 survive.
        let inst = datagen::generate_tight_bound(2).unwrap();
        let s = ConsistentSet::full(inst.matrix.n_rows());
        let cx = CounterExample {
            column: 0,
            target_value: inst.matrix.value(inst.target_row, 0),
        };
        let out = eliminate(&s, &inst.matrix, &cx);
        assert_eq!(out.len(), 3);
        assert!(out.contains(inst.target_row));
    }

    #[test]
    fn eliminate_is_idempotent() {
        let h = matrix(&[&[0, 1, 2], &[1, 1, 0], &[0, 2, 2]]);
        let s = ConsistentSet::full(3);
        let cx = CounterExample { column: 1, target_value: 1 };
        let once = eliminate(&s, &h, &cx);
        let twice = eliminate(&once, &h, &cx);
        assert_eq!(once, twice);
    }

    #[test]
    fn sample_singleton_is_forced() {
        let p = ExampleDistribution::uniform(4);
        let cond = conditional_distribution(&p, &[2]).unwrap();
        let mut rng = RngStream::new(9);
        for _ in 0..10 {
            assert_eq!(cond.sample(&mut rng), 2);
        }
    }

    #[test]
    fn sample_frequencies_match_mass() {
        let p = ExampleDistribution::uniform(4);
        let cond = conditional_distribution(&p, &[0, 2]).unwrap();
        let mut rng = RngStream::new(20250801);
        let draws = 100_000;
        let hits = (0..draws).filter(|_| cond.sample(&mut rng) == 0).count();
        let freq = hits as f64 / draws as f64;
        assert!((0.49..=0.51).contains(&freq), "freq {freq}");
    }

    #[test]
    fn rng_streams_are_reproducible() {
        let mut a = RngStream::new(77);
        let mut b = RngStream::new(77);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = RngStream::new(78);
        assert_ne!(RngStream::new(77).next_u64(), c.next_u64());
    }

    #[test]
    fn distribution_validation() {
        assert!(ExampleDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(ExampleDistribution::new(vec![0.5, 0.0, 0.5]).is_err());
        assert!(ExampleDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ExampleDistribution::new(vec![]).is_err());
        assert!(TargetPrior::new(vec![0.0, 1.0]).is_ok());
        assert!(TargetPrior::new(vec![0.3, 0.3]).is_err());
        assert!(TargetPrior::new(vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn matrix_csv_round_trip() {
        let h = matrix(&[&[0, 1, 2], &[3, 4, 5]]);
        let parsed = HypothesisMatrix::parse_csv(&h.to_csv()).unwrap();
        assert_eq!(h, parsed);
        assert!(HypothesisMatrix::parse_csv("1,2\n-3,4\n").is_err());
    }

    #[test]
    fn distribution_line_round_trip() {
        let p = ExampleDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let parsed = ExampleDistribution::parse_line(&p.to_line()).unwrap();
        assert_eq!(p, parsed);
    }
}
