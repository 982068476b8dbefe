//! Simulated teacher for the exact and approximate settings.
//!
//! The exact teacher accepts only the target row; the approximate teacher
//! accepts any query whose disagreement region with the target has mass below
//! epsilon. For a rejected query it draws one counter-example column from the
//! example distribution conditioned on the disagreement region and reveals the
//! target's value there.

use crate::concept::{
    conditional_distribution, difference_set, CounterExample, ExampleDistribution,
    HypothesisMatrix, RngStream,
};
use crate::LrcError;

/// Acceptance rule the teacher applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeacherMode {
    /// Accept only the target itself.
    Exact,
    /// Accept any query that is not epsilon-bad. `delta` is carried along for
    /// bound computation and reporting; it does not affect responses.
    Pac { epsilon: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeacherResponse {
    Accepted,
    CounterExample(CounterExample),
}

/// True iff the query's disagreement region with the target has total
/// probability at least `epsilon`.
pub fn epsilon_bad(
    h: &HypothesisMatrix,
    p: &ExampleDistribution,
    query: usize,
    target: usize,
    epsilon: f64,
) -> bool {
    p.mass(&difference_set(h, query, target)) >= epsilon
}

/// Teacher bound to one matrix, example distribution and hidden target.
/// Stateless apart from the rng handed to [`respond`](Self::respond); one
/// teacher per trial, trials may run concurrently.
#[derive(Debug, Clone)]
pub struct Teacher<'a> {
    matrix: &'a HypothesisMatrix,
    dist: &'a ExampleDistribution,
    target: usize,
    mode: TeacherMode,
}

impl<'a> Teacher<'a> {
    pub fn new(
        matrix: &'a HypothesisMatrix,
        dist: &'a ExampleDistribution,
        target: usize,
        mode: TeacherMode,
    ) -> Result<Self, LrcError> {
        if target >= matrix.n_rows() {
            return Err(LrcError::InvalidConfig(format!(
                "target row {target} out of range (matrix has {} rows)",
                matrix.n_rows()
            )));
        }
        if dist.len() != matrix.n_cols() {
            return Err(LrcError::ShapeMismatch(format!(
                "distribution has {} columns, matrix has {}",
                dist.len(),
                matrix.n_cols()
            )));
        }
        if let TeacherMode::Pac { epsilon, .. } = mode {
            if !(epsilon > 0.0) || !epsilon.is_finite() {
                return Err(LrcError::InvalidConfig(format!(
                    "epsilon must be positive, got {epsilon}"
                )));
            }
        }
        Ok(Teacher { matrix, dist, target, mode })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn mode(&self) -> TeacherMode {
        self.mode
    }

    /// Checks the query against the mode's acceptance rule; on rejection the
    /// counter-example column is drawn from the conditioned distribution and
    /// paired with the target row's value there.
    pub fn respond(&self, query: usize, rng: &mut RngStream) -> TeacherResponse {
        assert!(query < self.matrix.n_rows(), "query row out of range");
        let diff = difference_set(self.matrix, query, self.target);
        let accepted = match self.mode {
            TeacherMode::Exact => diff.is_empty(),
            TeacherMode::Pac { epsilon, .. } => self.dist.mass(&diff) < epsilon,
        };
        if accepted {
            return TeacherResponse::Accepted;
        }
        let cond = conditional_distribution(self.dist, &diff)
            .expect("rejected query has a non-empty disagreement region");
        let column = cond.sample(rng);
        TeacherResponse::CounterExample(CounterExample {
            column,
            target_value: self.matrix.value(self.target, column),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen;

    fn identity4() -> HypothesisMatrix {
        datagen::generate_identity(4).unwrap()
    }

    #[test]
    fn epsilon_bad_of_target_is_false() {
        let h = identity4();
        let p = ExampleDistribution::uniform(4);
        assert!(!epsilon_bad(&h, &p, 1, 1, 0.01));
    }

    #[test]
    fn epsilon_bad_threshold() {
        // 10 uniform columns, |D(0,1)| = 3: disagreement mass 0.3.
        let mut rows = vec![vec![0u32; 10], vec![0u32; 10]];
        for x in 0..10 {
            rows[0][x] = x as u32 * 10;
            rows[1][x] = x as u32 * 10 + u32::from(x < 3);
        }
        let h = HypothesisMatrix::from_rows(rows).unwrap();
        h.validate().unwrap();
        let p = ExampleDistribution::uniform(10);
        assert_eq!(difference_set(&h, 0, 1), vec![0, 1, 2]);
        assert!(epsilon_bad(&h, &p, 0, 1, 0.2));
        assert!(!epsilon_bad(&h, &p, 0, 1, 0.35));
    }

    #[test]
    fn exact_mode_accepts_only_target() {
        let h = identity4();
        let p = ExampleDistribution::uniform(4);
        let t = Teacher::new(&h, &p, 2, TeacherMode::Exact).unwrap();
        let mut rng = RngStream::new(1);
        assert_eq!(t.respond(2, &mut rng), TeacherResponse::Accepted);
        for q in [0usize, 1, 3] {
            assert!(matches!(t.respond(q, &mut rng), TeacherResponse::CounterExample(_)));
        }
    }

    #[test]
    fn counter_example_is_valid_and_uniform_over_diff() {
        // Identity, target row 0, query row 3: disagreement columns {0, 3},
        // each drawn with probability 1/2; revealed values 1 at 0, 0 at 3.
        let h = identity4();
        let p = ExampleDistribution::uniform(4);
        let t = Teacher::new(&h, &p, 0, TeacherMode::Exact).unwrap();
        let mut rng = RngStream::new(31337);
        let draws = 40_000;
        let mut at0 = 0usize;
        for _ in 0..draws {
            match t.respond(3, &mut rng) {
                TeacherResponse::CounterExample(cx) => {
                    assert!(cx.column == 0 || cx.column == 3);
                    assert_eq!(cx.target_value, h.value(0, cx.column));
                    assert_ne!(h.value(3, cx.column), cx.target_value);
                    if cx.column == 0 {
                        at0 += 1;
                    }
                }
                TeacherResponse::Accepted => panic!("wrong query accepted in exact mode"),
            }
        }
        let freq = at0 as f64 / draws as f64;
        // 3 sigma for Bernoulli(1/2) at 40k draws is 0.0075.
        assert!((freq - 0.5).abs() < 0.0075, "freq {freq}");
    }

    #[test]
    fn pac_mode_accepts_non_epsilon_bad_queries() {
        let h = identity4();
        let p = ExampleDistribution::uniform(4);
        // Any wrong query disagrees on two columns: mass 0.5.
        let t = Teacher::new(&h, &p, 0, TeacherMode::Pac { epsilon: 0.6, delta: 0.1 }).unwrap();
        let mut rng = RngStream::new(5);
        for q in 0..4 {
            assert_eq!(t.respond(q, &mut rng), TeacherResponse::Accepted);
        }
        let strict =
            Teacher::new(&h, &p, 0, TeacherMode::Pac { epsilon: 0.5, delta: 0.1 }).unwrap();
        for q in 1..4 {
            assert!(matches!(
                strict.respond(q, &mut rng),
                TeacherResponse::CounterExample(_)
            ));
        }
        assert_eq!(strict.respond(0, &mut rng), TeacherResponse::Accepted);
    }

    #[test]
    fn teacher_rejects_bad_config() {
        let h = identity4();
        let p = ExampleDistribution::uniform(4);
        assert!(Teacher::new(&h, &p, 4, TeacherMode::Exact).is_err());
        let p3 = ExampleDistribution::uniform(3);
        assert!(Teacher::new(&h, &p3, 0, TeacherMode::Exact).is_err());
        assert!(Teacher::new(&h, &p, 0, TeacherMode::Pac { epsilon: 0.0, delta: 0.1 }).is_err());
    }
}
