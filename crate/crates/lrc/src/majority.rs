//! Majority learner: query the consistent row that best agrees with the
//! column-wise majority vote.
//!
//! Per round the learner recomputes, over the consistent rows only, the
//! column-wise most frequent value (ties toward the smaller value), then picks
//! the consistent row maximizing the probability mass of columns on which it
//! matches that vote (score ties toward the lexicographically smaller row).
//! Both passes are plain scans, so a round costs O(|S| * m) cell visits; the
//! visit counter exists to assert exactly that.

use crate::concept::{
    eliminate, ConsistentSet, ExampleDistribution, HypothesisMatrix, RngStream,
};
use crate::teacher::{Teacher, TeacherMode, TeacherResponse};
use crate::transcript::{RoundRecord, Transcript};
use crate::LrcError;

use std::collections::BTreeMap;

/// Alphabets up to this size use a dense per-column counter; larger values
/// fall back to per-column maps.
const DENSE_ALPHABET_CAP: usize = 256;

/// Column-wise most frequent value over the consistent rows, ties broken in
/// favor of the smaller value. The result need not be a row of the matrix.
pub fn compute_majority(h: &HypothesisMatrix, s: &ConsistentSet) -> Vec<u32> {
    compute_majority_counted(h, s, &mut 0)
}

fn compute_majority_counted(
    h: &HypothesisMatrix,
    s: &ConsistentSet,
    ops: &mut u64,
) -> Vec<u32> {
    assert!(!s.is_empty(), "majority of an empty consistent set");
    let m = h.n_cols();
    let alphabet = h.max_value() as usize + 1;
    if alphabet <= DENSE_ALPHABET_CAP {
        let mut counts = vec![0u32; m * alphabet];
        for r in s.iter() {
            let row = h.row(r);
            for (x, &v) in row.iter().enumerate() {
                counts[x * alphabet + v as usize] += 1;
            }
            *ops += m as u64;
        }
        let mut maj = Vec::with_capacity(m);
        for x in 0..m {
            let slot = &counts[x * alphabet..(x + 1) * alphabet];
            let mut best_v = 0u32;
            let mut best_c = 0u32;
            for (v, &c) in slot.iter().enumerate() {
                // strictly greater: ties keep the smaller value
                if c > best_c {
                    best_c = c;
                    best_v = v as u32;
                }
            }
            maj.push(best_v);
            *ops += alphabet as u64;
        }
        maj
    } else {
        let mut maj = Vec::with_capacity(m);
        for x in 0..m {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for r in s.iter() {
                *counts.entry(h.value(r, x)).or_insert(0) += 1;
            }
            *ops += s.len() as u64;
            let mut best_v = 0u32;
            let mut best_c = 0u32;
            for (&v, &c) in &counts {
                if c > best_c {
                    best_c = c;
                    best_v = v;
                }
            }
            maj.push(best_v);
        }
        maj
    }
}

/// Consistent row maximizing the probability mass of agreement with the
/// majority vector; among maximizers, the lexicographically smallest row by
/// raw column values.
pub fn best_majority_hypothesis(
    h: &HypothesisMatrix,
    s: &ConsistentSet,
    p: &ExampleDistribution,
) -> usize {
    best_majority_counted(h, s, p, &mut 0)
}

fn best_majority_counted(
    h: &HypothesisMatrix,
    s: &ConsistentSet,
    p: &ExampleDistribution,
    ops: &mut u64,
) -> usize {
    let maj = compute_majority_counted(h, s, ops);
    let m = h.n_cols();
    let mut best: Option<(f64, usize)> = None;
    for r in s.iter() {
        let row = h.row(r);
        let mut score = 0.0;
        for x in 0..m {
            if row[x] == maj[x] {
                score += p.prob(x);
            }
        }
        *ops += m as u64;
        best = match best {
            None => Some((score, r)),
            Some((bs, br)) => {
                if score > bs || (score == bs && h.row(r) < h.row(br)) {
                    Some((score, r))
                } else {
                    Some((bs, br))
                }
            }
        };
    }
    best.expect("non-empty consistent set").1
}

/// One hypothesis selection with its cell-visit count, for the linear-time
/// scaling assertion.
pub fn round_with_ops(
    h: &HypothesisMatrix,
    s: &ConsistentSet,
    p: &ExampleDistribution,
) -> (usize, u64) {
    let mut ops = 0u64;
    let pick = best_majority_counted(h, s, p, &mut ops);
    (pick, ops)
}

/// Runs the majority learner against an exact teacher until acceptance.
pub fn run_majority(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    target: usize,
    rng: &mut RngStream,
    max_rounds: usize,
) -> Result<Transcript, LrcError> {
    let teacher = Teacher::new(h, p, target, TeacherMode::Exact)?;
    let mut s = ConsistentSet::full(h.n_rows());
    let mut records = Vec::new();
    for _ in 0..max_rounds {
        let query = best_majority_hypothesis(h, &s, p);
        match teacher.respond(query, rng) {
            TeacherResponse::Accepted => {
                return Ok(Transcript { target, accepted: query, records });
            }
            TeacherResponse::CounterExample(cx) => {
                let before = s.len();
                s = eliminate(&s, h, &cx);
                debug_assert!(s.contains(target));
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
