//! Seeded trial batches for one experiment configuration.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::arbitrary::run_arbitrary;
use crate::concept::{
    difference_set, ExampleDistribution, HypothesisMatrix, RngStream, TargetPrior,
};
use crate::datagen;
use crate::harness::config::{Algorithm, DatasetSpec, DistSpec, ExperimentConfig};
use crate::instrument::{bounds, BoundTable};
use crate::majority::run_majority;
use crate::randomized::run_randomized;
use crate::LrcError;

/// Epsilon/delta used for bound reporting when a run does not define them.
const DEFAULT_EPSILON: f64 = 0.1;
const DEFAULT_DELTA: f64 = 0.1;

/// One trial's outcome. `wall_ms` is informational and deliberately excluded
/// from CSV rows so repeated runs stay byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub rounds: usize,
    pub accepted_row: usize,
    pub error_mass: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub trials: usize,
    pub mean_rounds: f64,
    pub std_rounds: f64,
    pub min_rounds: usize,
    pub max_rounds: usize,
}

impl Aggregate {
    /// Mean and sample standard deviation of the per-trial round counts.
    pub fn from_rows(rows: &[TrialRow]) -> Self {
        let n = rows.len();
        let mean = rows.iter().map(|r| r.rounds as f64).sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss = rows
                .iter()
                .map(|r| (r.rounds as f64 - mean).powi(2))
                .sum::<f64>();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Aggregate {
            trials: n,
            mean_rounds: mean,
            std_rounds: std,
            min_rounds: rows.iter().map(|r| r.rounds).min().unwrap_or(0),
            max_rounds: rows.iter().map(|r| r.rounds).max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    /// Fully resolved configuration, embedded for provenance.
    pub metadata: Vec<(String, String)>,
    pub trials: Vec<TrialRow>,
    pub aggregate: Aggregate,
    pub bounds: BoundTable,
}

/// Dataset and distributions materialized once and shared read-only across
/// trials.
pub struct PreparedExperiment {
    pub matrix: HypothesisMatrix,
    pub p: ExampleDistribution,
    pub q: Option<TargetPrior>,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<PreparedExperiment, LrcError> {
    let matrix = match &cfg.dataset {
        DatasetSpec::Clustered {
            columns,
            hypotheses,
            clusters,
            max_flips,
            alphabet,
            dataset_seed,
        } => {
            let gen_cfg = datagen::ClusterConfig {
                num_columns: *columns,
                num_hypotheses: *hypotheses,
                num_clusters: *clusters,
                max_flips: *max_flips,
                value_alphabet: *alphabet,
                seed: dataset_seed.unwrap_or(cfg.seed),
            };
            datagen::generate_clustered(&gen_cfg)?.matrix
        }
        DatasetSpec::Random { hypotheses, columns, alphabet } => {
            datagen::generate_random(*hypotheses, *columns, *alphabet, cfg.seed)?
        }
        DatasetSpec::Identity { size } => datagen::generate_identity(*size)?,
        DatasetSpec::TightBound { n } => datagen::generate_tight_bound(*n)?.matrix,
        DatasetSpec::File { path } => {
            let matrix = HypothesisMatrix::read_csv(path).map_err(|e| match e {
                LrcError::Io(io) => LrcError::InvalidConfig(format!(
                    "cannot read matrix {}: {io}",
                    path.display()
                )),
                other => other,
            })?;
            if let Err(v) = matrix.validate() {
                return Err(LrcError::InvalidMatrix(v.to_string()));
            }
            matrix
        }
    };
    let p = match &cfg.p {
        DistSpec::Uniform => ExampleDistribution::uniform(matrix.n_cols()),
        DistSpec::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                LrcError::InvalidConfig(format!("cannot read p {}: {e}", path.display()))
            })?;
            let p = ExampleDistribution::parse_line(&text)?;
            if p.len() != matrix.n_cols() {
                return Err(LrcError::ShapeMismatch(format!(
                    "p has {} entries, matrix has {} columns",
                    p.len(),
                    matrix.n_cols()
                )));
            }
            p
        }
    };
    let q = if cfg.algorithm == Algorithm::Randomized {
        Some(match &cfg.q {
            DistSpec::Uniform => TargetPrior::uniform(matrix.n_rows()),
            DistSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    LrcError::InvalidConfig(format!("cannot read q {}: {e}", path.display()))
                })?;
                let q = TargetPrior::parse_line(&text)?;
                if q.len() != matrix.n_rows() {
                    return Err(LrcError::ShapeMismatch(format!(
                        "q has {} entries, matrix has {} rows",
                        q.len(),
                        matrix.n_rows()
                    )));
                }
                q
            }
        })
    } else {
        None
    };
    Ok(PreparedExperiment { matrix, p, q })
}

/// Runs trial `t`: seed `base + t`, target drawn first (uniform, or from the
/// prior for the randomized learner), then one full learning run.
pub fn run_trial(
    prep: &PreparedExperiment,
    cfg: &ExperimentConfig,
    t: usize,
) -> Result<TrialRow, LrcError> {
    let seed = cfg.seed.wrapping_add(t as u64);
    let mut rng = RngStream::new(seed);
    let n = prep.matrix.n_rows();
    let max_rounds = cfg.max_rounds.unwrap_or(n);
    let started = Instant::now();
    let (transcript, error_mass) = match cfg.algorithm {
        Algorithm::Majority => {
            let target = rng.gen_index(n);
            let tr = run_majority(&prep.matrix, &prep.p, target, &mut rng, max_rounds)?;
            (tr, 0.0)
        }
        Algorithm::Randomized => {
            let q = prep.q.as_ref().expect("prepared randomized run has a prior");
            let target = q.sample(&mut rng);
            let tr = run_randomized(&prep.matrix, &prep.p, q, target, &mut rng, max_rounds)?;
            (tr, 0.0)
        }
        Algorithm::Arbitrary => {
            let target = rng.gen_index(n);
            let tr = run_arbitrary(
                &prep.matrix,
                &prep.p,
                cfg.epsilon.expect("validated config"),
                cfg.delta.expect("validated config"),
                cfg.strategy.expect("validated config"),
                target,
                &mut rng,
                max_rounds,
            )?;
            let err = prep
                .p
                .mass(&difference_set(&prep.matrix, tr.accepted, target));
            (tr, err)
        }
    };
    Ok(TrialRow {
        trial: t,
        seed,
        rounds: transcript.counter_examples(),
        accepted_row: transcript.accepted,
        error_mass,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs all trials (in parallel; per-trial seeds make the result identical to
/// a sequential run) and aggregates.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, LrcError> {
    cfg.validate()?;
    let prep = prepare(cfg)?;
    let rows: Result<Vec<TrialRow>, LrcError> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(&prep, cfg, t))
        .collect();
    let rows = rows?;
    let aggregate = Aggregate::from_rows(&rows);
    let bound_table = bounds(
        prep.matrix.n_rows(),
        cfg.epsilon.unwrap_or(DEFAULT_EPSILON),
        cfg.delta.unwrap_or(DEFAULT_DELTA),
    )?;
    let mut metadata = cfg.resolved_pairs();
    metadata.push(("resolved_rows".into(), prep.matrix.n_rows().to_string()));
    metadata.push(("resolved_columns".into(), prep.matrix.n_cols().to_string()));
    metadata.push((
        "resolved_max_rounds".into(),
        cfg.max_rounds.unwrap_or(prep.matrix.n_rows()).to_string(),
    ));
    Ok(RunResult { metadata, trials: rows, aggregate, bounds: bound_table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::OutputFormat;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse_str(text).unwrap()
    }

    #[test]
    fn singleton_class_means_zero_rounds() {
        // identity refuses n < 2, so use a 1-row file-free random class via
        // tight_bound? smallest honest path: a one-row matrix from config is
        // only reachable through files; use trials on a 2-row class with a
        // pinned target instead: majority on |H|=2 has mean <= 1.
        let cfg = config(
            "algorithm = majority\ndataset = random\nhypotheses = 2\ncolumns = 2\ntrials = 4\nseed = 1\n",
        );
        let res = run_experiment(&cfg).unwrap();
        assert!(res.aggregate.mean_rounds <= 1.0);
        for row in &res.trials {
            assert!(row.rounds <= 1);
            assert_eq!(row.error_mass, 0.0);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let cfg = config(
            "algorithm = randomized\ndataset = random\nhypotheses = 32\ncolumns = 10\ntrials = 12\nseed = 9\n",
        );
        let res = run_experiment(&cfg).unwrap();
        let prep = prepare(&cfg).unwrap();
        for (t, row) in res.trials.iter().enumerate() {
            let seq = run_trial(&prep, &cfg, t).unwrap();
            assert_eq!(row.trial, seq.trial);
            assert_eq!(row.seed, seq.seed);
            assert_eq!(row.rounds, seq.rounds);
            assert_eq!(row.accepted_row, seq.accepted_row);
            assert_eq!(row.error_mass, seq.error_mass);
        }
    }

    #[test]
    fn aggregate_recomputes_from_rows() {
        let cfg = config(
            "algorithm = arbitrary\ndataset = random\nhypotheses = 24\ncolumns = 8\ntrials = 10\nseed = 3\nepsilon = 0.1\ndelta = 0.1\nstrategy = middle\n",
        );
        let res = run_experiment(&cfg).unwrap();
        let agg = Aggregate::from_rows(&res.trials);
        assert_eq!(agg.mean_rounds, res.aggregate.mean_rounds);
        assert_eq!(agg.std_rounds, res.aggregate.std_rounds);
        assert_eq!(agg.max_rounds, res.aggregate.max_rounds);
        // PAC acceptance never exceeds the allowed error
        for row in &res.trials {
            assert!(row.error_mass < 0.1);
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let dir = std::env::temp_dir().join("lrc_run_test_shape");
        std::fs::create_dir_all(&dir).unwrap();
        let ppath = dir.join("p.txt");
        std::fs::write(&ppath, "0.5,0.5\n").unwrap();
        let cfg = config(&format!(
            "algorithm = majority\ndataset = random\nhypotheses = 8\ncolumns = 6\ntrials = 1\np_dist = file\np_file = {}\n",
            ppath.display()
        ));
        let err = run_experiment(&cfg).unwrap_err();
        assert!(matches!(err, LrcError::ShapeMismatch(_)));
    }

    #[test]
    fn tight_bound_dataset_runs() {
        let cfg = ExperimentConfig {
            algorithm: Algorithm::Majority,
            dataset: DatasetSpec::TightBound { n: 2 },
            p: DistSpec::Uniform,
            q: DistSpec::Uniform,
            epsilon: None,
            delta: None,
            strategy: None,
            trials: 5,
            seed: 11,
            max_rounds: None,
            out: None,
            format: OutputFormat::Csv,
        };
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.trials.len(), 5);
        assert!(res.aggregate.max_rounds <= 5);
    }
}
