//! Parameter sweeps behind the two figure protocols: learning time versus
//! class size, and arbitrary-learner rounds versus allowed error.

use serde::Serialize;

use crate::arbitrary::{run_arbitrary, SelectionStrategy};
use crate::concept::{ExampleDistribution, HypothesisMatrix, RngStream};
use crate::datagen;
use crate::harness::run::{Aggregate, TrialRow};
use crate::instrument::{bounds, log2, log43};
use crate::majority::run_majority;
use crate::LrcError;

/// The three fixed-position strategies the sweeps average over.
pub const SWEEP_STRATEGIES: [SelectionStrategy; 3] = [
    SelectionStrategy::First,
    SelectionStrategy::Middle,
    SelectionStrategy::Last,
];

/// Dataset family used by a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepDataset {
    Clustered { columns: usize, clusters: usize, max_flips: usize },
    Random { columns: usize },
}

#[derive(Debug, Clone)]
pub struct Fig1Params {
    pub h_sizes: Vec<usize>,
    pub dataset: SweepDataset,
    pub trials: usize,
    pub seed: u64,
    /// Allowed error of the companion arbitrary learner.
    pub epsilon: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Row {
    pub algorithm: String,
    pub h_size: usize,
    pub mean_rounds: f64,
    pub std_rounds: f64,
    /// log_{4/3} |H|, the proof-base bound.
    pub bound_majority_log43: f64,
    /// log2 |H|, the reporting-convention variant.
    pub bound_majority_log2: f64,
    pub bound_arbitrary: f64,
}

#[derive(Debug, Clone)]
pub struct Fig2Params {
    pub h_sizes: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub delta: f64,
    pub dataset: SweepDataset,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Row {
    pub h_size: usize,
    pub epsilon: f64,
    pub mean_rounds: f64,
    pub std_rounds: f64,
    /// Non-interactive sample-complexity comparison (1/eps) log2(|H|/delta).
    pub pac_bound: f64,
}

fn mix(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer over seed xor salted golden ratio
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn build_dataset(
    dataset: &SweepDataset,
    h_size: usize,
    seed: u64,
) -> Result<HypothesisMatrix, LrcError> {
    match dataset {
        SweepDataset::Clustered { columns, clusters, max_flips } => {
            let cfg = datagen::ClusterConfig {
                num_columns: *columns,
                num_hypotheses: h_size,
                num_clusters: (*clusters).min(h_size),
                max_flips: *max_flips,
                value_alphabet: 2,
                seed,
            };
            Ok(datagen::generate_clustered(&cfg)?.matrix)
        }
        SweepDataset::Random { columns } => {
            datagen::generate_random(h_size, *columns, 2, seed)
        }
    }
}

fn rounds_stats(rounds: &[usize]) -> (f64, f64) {
    let rows: Vec<TrialRow> = rounds
        .iter()
        .enumerate()
        .map(|(i, &r)| TrialRow {
            trial: i,
            seed: 0,
            rounds: r,
            accepted_row: 0,
            error_mass: 0.0,
            wall_ms: 0.0,
        })
        .collect();
    let agg = Aggregate::from_rows(&rows);
    (agg.mean_rounds, agg.std_rounds)
}

/// Majority and arbitrary learning time against class size. One row per
/// (algorithm, |H|); the arbitrary row pools the three fixed-position
/// strategies, each run `trials` times.
pub fn sweep_figure1(params: &Fig1Params) -> Result<Vec<Fig1Row>, LrcError> {
    if params.h_sizes.is_empty() {
        return Err(LrcError::InvalidConfig("empty |H| grid".into()));
    }
    if params.trials == 0 {
        return Err(LrcError::InvalidConfig("trials must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for &h_size in &params.h_sizes {
        let matrix = build_dataset(&params.dataset, h_size, mix(params.seed, h_size as u64))?;
        let p = ExampleDistribution::uniform(matrix.n_cols());
        let bound_table = bounds(h_size, params.epsilon, params.delta)?;

        let mut majority_rounds = Vec::with_capacity(params.trials);
        for t in 0..params.trials {
            let mut rng = RngStream::new(mix(params.seed, h_size as u64) ^ (t as u64 + 1));
            let target = rng.gen_index(matrix.n_rows());
            let tr = run_majority(&matrix, &p, target, &mut rng, matrix.n_rows())?;
            majority_rounds.push(tr.counter_examples());
        }
        let (mean, std) = rounds_stats(&majority_rounds);
        rows.push(Fig1Row {
            algorithm: "majority".into(),
            h_size,
            mean_rounds: mean,
            std_rounds: std,
            bound_majority_log43: log43(h_size as f64),
            bound_majority_log2: log2(h_size as f64),
            bound_arbitrary: bound_table.arbitrary,
        });

        let mut arbitrary_rounds = Vec::with_capacity(3 * params.trials);
        for (si, strategy) in SWEEP_STRATEGIES.iter().enumerate() {
            for t in 0..params.trials {
                let mut rng = RngStream::new(
                    mix(params.seed, h_size as u64 ^ (si as u64 + 1) << 32)
                        ^ (t as u64 + 1),
                );
                let target = rng.gen_index(matrix.n_rows());
                let tr = run_arbitrary(
                    &matrix,
                    &p,
                    params.epsilon,
                    params.delta,
                    *strategy,
                    target,
                    &mut rng,
                    matrix.n_rows(),
                )?;
                arbitrary_rounds.push(tr.counter_examples());
            }
        }
        let (mean, std) = rounds_stats(&arbitrary_rounds);
        rows.push(Fig1Row {
            algorithm: "arbitrary".into(),
            h_size,
            mean_rounds: mean,
            std_rounds: std,
            bound_majority_log43: log43(h_size as f64),
            bound_majority_log2: log2(h_size as f64),
            bound_arbitrary: bound_table.arbitrary,
        });
    }
    Ok(rows)
}

/// Arbitrary-learner rounds against allowed error, next to the
/// non-interactive sample-complexity bound. One row per (|H|, epsilon).
pub fn sweep_figure2(params: &Fig2Params) -> Result<Vec<Fig2Row>, LrcError> {
    if params.h_sizes.is_empty() || params.epsilons.is_empty() {
        return Err(LrcError::InvalidConfig("empty sweep grid".into()));
    }
    if params.trials == 0 {
        return Err(LrcError::InvalidConfig("trials must be at least 1".into()));
    }
    for &eps in &params.epsilons {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(LrcError::InvalidConfig(format!("epsilon {eps} not in (0,1)")));
        }
    }
    let mut rows = Vec::new();
    for &h_size in &params.h_sizes {
        let matrix = build_dataset(&params.dataset, h_size, mix(params.seed, h_size as u64))?;
        let p = ExampleDistribution::uniform(matrix.n_cols());
        for &epsilon in &params.epsilons {
            let mut rounds = Vec::with_capacity(3 * params.trials);
            for (si, strategy) in SWEEP_STRATEGIES.iter().enumerate() {
                for t in 0..params.trials {
                    let mut rng = RngStream::new(
                        mix(params.seed, h_size as u64 ^ (si as u64 + 1) << 32)
                            ^ mix(epsilon.to_bits(), t as u64 + 1),
                    );
                    let target = rng.gen_index(matrix.n_rows());
                    let tr = run_arbitrary(
                        &matrix,
                        &p,
                        epsilon,
                        params.delta,
                        *strategy,
                        target,
                        &mut rng,
                        matrix.n_rows(),
                    )?;
                    rounds.push(tr.counter_examples());
                }
            }
            let (mean, std) = rounds_stats(&rounds);
            rows.push(Fig2Row {
                h_size,
                epsilon,
                mean_rounds: mean,
                std_rounds: std,
                pac_bound: log2(h_size as f64 / params.delta) / epsilon,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_rows_and_bounds() {
        let params = Fig1Params {
            h_sizes: vec![64, 128, 256],
            dataset: SweepDataset::Random { columns: 32 },
            trials: 20,
            seed: 2,
            epsilon: 0.05,
            delta: 0.1,
        };
        let rows = sweep_figure1(&params).unwrap();
        assert_eq!(rows.len(), 6); // two algorithms per grid point
        for row in &rows {
            if row.algorithm == "majority" {
                assert!(row.mean_rounds <= row.bound_majority_log43);
            } else {
                assert!(row.mean_rounds <= row.bound_arbitrary);
            }
        }
        let b256 = rows.iter().find(|r| r.h_size == 256).unwrap();
        assert!((b256.bound_majority_log43 - 19.274566544732516).abs() < 1e-9);
        // means roughly grow with |H| for the majority learner
        let m: Vec<f64> = rows
            .iter()
            .filter(|r| r.algorithm == "majority")
            .map(|r| r.mean_rounds)
            .collect();
        assert!(m[2] + 1.0 >= m[0], "means {m:?}");
    }

    #[test]
    fn figure1_rejects_empty_grid() {
        let params = Fig1Params {
            h_sizes: vec![],
            dataset: SweepDataset::Random { columns: 8 },
            trials: 1,
            seed: 0,
            epsilon: 0.1,
            delta: 0.1,
        };
        assert!(sweep_figure1(&params).is_err());
    }

    #[test]
    fn figure2_bound_column_and_trend() {
        let params = Fig2Params {
            h_sizes: vec![256],
            epsilons: vec![0.05, 0.3, 0.6],
            delta: 0.1,
            dataset: SweepDataset::Random { columns: 24 },
            trials: 15,
            seed: 4,
        };
        let rows = sweep_figure2(&params).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert!(row.mean_rounds <= row.pac_bound);
            let expected = log2(256.0 / 0.1) / row.epsilon;
            assert!((row.pac_bound - expected).abs() < 1e-12);
        }
        assert!(rows[0].mean_rounds >= rows[2].mean_rounds);
    }
}
