//! Instance generators: clustered synthetic datasets, the adversarial
//! tight-bound construction, identity matrices, and random classes.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::path::Path;

use crate::concept::{HypothesisMatrix, RngStream};
use crate::LrcError;

const ROW_RETRY_BUDGET: usize = 64;
const REPAIR_BUDGET: usize = 32;

/// Parameters of the clustered generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterConfig {
    pub num_columns: usize,
    pub num_hypotheses: usize,
    pub num_clusters: usize,
    /// Members differ from their cluster representative in 1..=max_flips columns.
    pub max_flips: usize,
    /// Alphabet size; 2 for binary like/dislike data.
    pub value_alphabet: u32,
    pub seed: u64,
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<(), LrcError> {
        if self.num_columns == 0 || self.num_hypotheses == 0 {
            return Err(LrcError::InvalidConfig("empty dataset shape".into()));
        }
        if self.num_clusters == 0 || self.num_clusters > self.num_hypotheses {
            return Err(LrcError::InvalidConfig(
                "num_clusters must be in 1..=num_hypotheses".into(),
            ));
        }
        if self.max_flips == 0 || self.max_flips > self.num_columns {
            return Err(LrcError::InvalidConfig(
                "max_flips must be in 1..=num_columns".into(),
            ));
        }
        if self.value_alphabet < 2 {
            return Err(LrcError::InvalidConfig("alphabet must have at least 2 values".into()));
        }
        if !count_feasible(self.value_alphabet as u128, self.num_columns, self.num_hypotheses) {
            return Err(LrcError::InvalidConfig(
                "alphabet^columns is smaller than the hypothesis count".into(),
            ));
        }
        Ok(())
    }
}

/// Generated clustered instance with its row-to-cluster assignment.
#[derive(Debug, Clone)]
pub struct ClusteredDataset {
    pub matrix: HypothesisMatrix,
    pub assignments: Vec<usize>,
    pub config: ClusterConfig,
}

impl ClusteredDataset {
    /// Writes `matrix.csv` plus a `meta.txt` key-value sidecar into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), LrcError> {
        std::fs::create_dir_all(dir)?;
        self.matrix.write_csv(&dir.join("matrix.csv"))?;
        let mut meta = String::new();
        meta.push_str("generator = clustered\n");
        meta.push_str(&format!("num_columns = {}\n", self.config.num_columns));
        meta.push_str(&format!("num_hypotheses = {}\n", self.config.num_hypotheses));
        meta.push_str(&format!("num_clusters = {}\n", self.config.num_clusters));
        meta.push_str(&format!("max_flips = {}\n", self.config.max_flips));
        meta.push_str(&format!("value_alphabet = {}\n", self.config.value_alphabet));
        meta.push_str(&format!("seed = {}\n", self.config.seed));
        let assignment: Vec<String> =
            self.assignments.iter().map(|c| c.to_string()).collect();
        meta.push_str(&format!("cluster_assignment = {}\n", assignment.join(",")));
        std::fs::write(dir.join("meta.txt"), meta)?;
        Ok(())
    }
}

/// Cluster representatives are drawn uniformly per column; each member copies
/// its representative and flips 1..=max_flips columns to a different value.
/// Rows are assigned to clusters round-robin (row `i` belongs to cluster
/// `i % num_clusters`; rows below `num_clusters` are the representatives).
pub fn generate_clustered(cfg: &ClusterConfig) -> Result<ClusteredDataset, LrcError> {
    cfg.validate()?;
    let n = cfg.num_hypotheses;
    let m = cfg.num_columns;
    let k = cfg.num_clusters;
    let mut rng = RngStream::new(cfg.seed);
    let mut data = vec![0u32; n * m];
    let mut dedup: HashMap<u64, Vec<usize>> = HashMap::new();
    // flip set of each member row: (column, flipped value)
    let mut flips: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];

    for i in 0..n {
        let mut done = false;
        for _ in 0..ROW_RETRY_BUDGET {
            if i < k {
                for x in 0..m {
                    data[i * m + x] = rng.gen_index(cfg.value_alphabet as usize) as u32;
                }
            } else {
                let rep = i % k;
                let (rep_rows, rest) = data.split_at_mut(k * m);
                let row = &mut rest[(i - k) * m..(i - k + 1) * m];
                row.copy_from_slice(&rep_rows[rep * m..(rep + 1) * m]);
                let f = 1 + rng.gen_index(cfg.max_flips);
                let mut cols: Vec<usize> = Vec::with_capacity(f);
                while cols.len() < f {
                    let c = rng.gen_index(m);
                    if !cols.contains(&c) {
                        cols.push(c);
                    }
                }
                flips[i].clear();
                for &c in &cols {
                    let v = different_value(row[c], cfg.value_alphabet, &mut rng);
                    row[c] = v;
                    flips[i].push((c, v));
                }
            }
            if insert_unique(&data, m, i, &mut dedup) {
                done = true;
                break;
            }
        }
        if !done {
            return Err(LrcError::GenerationFailed("rows"));
        }
    }

    // Duplicate columns are essentially impossible at realistic sizes but the
    // invariant must hold: re-randomize the representatives in the second
    // offending column and rebuild the members there from their flip sets.
    for _ in 0..REPAIR_BUDGET {
        match first_duplicate_column(&data, n, m) {
            None => break,
            Some((j1, j2)) => {
                log::warn!("repairing duplicate columns {j1} and {j2}");
                for c in 0..k {
                    data[c * m + j2] = rng.gen_index(cfg.value_alphabet as usize) as u32;
                }
                for i in k..n {
                    let rep_value = data[(i % k) * m + j2];
                    data[i * m + j2] =
                        if flips[i].iter().any(|&(c, _)| c == j2) {
                            different_value(rep_value, cfg.value_alphabet, &mut rng)
                        } else {
                            rep_value
                        };
                }
            }
        }
    }

    let rows: Vec<Vec<u32>> = (0..n).map(|i| data[i * m..(i + 1) * m].to_vec()).collect();
    let matrix = HypothesisMatrix::from_rows(rows)?;
    if let Err(v) = matrix.validate() {
        return Err(LrcError::GenerationFailed(match v {
            crate::concept::Violation::DuplicateRows { .. } => "rows",
            crate::concept::Violation::DuplicateColumns { .. } => "columns",
        }));
    }
    let assignments = (0..n).map(|i| i % k).collect();
    Ok(ClusteredDataset { matrix, assignments, config: cfg.clone() })
}

/// Adversarial instance pinning the quarter-fraction per-round guarantee.
#[derive(Debug, Clone)]
pub struct TightBoundInstance {
    pub matrix: HypothesisMatrix,
    /// The modified all-zeros-prefix row the majority learner picks first.
    pub best_majority_row: usize,
    /// The row differing from it in the first and last columns.
    pub target_row: usize,
}

/// Builds the binary matrix over `2n + 1` columns whose rows are all
/// combinations of `n` ones among the first `2n` columns (last column zero),
/// with one row modified: the row with ones exactly in columns `n..2n`
/// (0-based) has column `n` toggled to zero and the last column toggled to
/// one. Every row keeps exactly `n` ones.
pub fn generate_tight_bound(n: usize) -> Result<TightBoundInstance, LrcError> {
    if !(2..=7).contains(&n) {
        return Err(LrcError::InvalidConfig(format!(
            "tight-bound size n must be in 2..=7, got {n}"
        )));
    }
    let m = 2 * n + 1;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for mask in 0u32..(1 << (2 * n)) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let mut row = vec![0u32; m];
        for j in 0..2 * n {
            row[j] = (mask >> j) & 1;
        }
        rows.push(row);
    }
    // 0-based: the proof's "column n+1" is index n, "last column" is index 2n.
    let base: Vec<u32> = (0..m)
        .map(|j| u32::from(j >= n && j < 2 * n))
        .collect();
    let modified_idx = rows
        .iter()
        .position(|r| *r == base)
        .expect("the zeros-then-ones combination is enumerated");
    rows[modified_idx][n] = 0;
    rows[modified_idx][2 * n] = 1;

    let mut target = rows[modified_idx].clone();
    target[0] = 1;
    target[2 * n] = 0;
    let target_idx = rows
        .iter()
        .position(|r| *r == target)
        .expect("the target combination is enumerated");

    let matrix = HypothesisMatrix::from_rows(rows)?;
    debug_assert_eq!(matrix.validate(), Ok(()));
    Ok(TightBoundInstance {
        matrix,
        best_majority_row: modified_idx,
        target_row: target_idx,
    })
}

/// n x n identity concept class.
pub fn generate_identity(n: usize) -> Result<HypothesisMatrix, LrcError> {
    if n < 2 {
        return Err(LrcError::InvalidConfig("identity size must be at least 2".into()));
    }
    let rows = (0..n)
        .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
        .collect();
    HypothesisMatrix::from_rows(rows)
}

/// Uniformly random class with distinct rows and columns.
pub fn generate_random(
    n_rows: usize,
    n_cols: usize,
    alphabet: u32,
    seed: u64,
) -> Result<HypothesisMatrix, LrcError> {
    if n_rows == 0 || n_cols == 0 || alphabet < 2 {
        return Err(LrcError::InvalidConfig("empty shape or alphabet".into()));
    }
    if !count_feasible(alphabet as u128, n_cols, n_rows)
        || !count_feasible(alphabet as u128, n_rows, n_cols)
    {
        return Err(LrcError::InvalidConfig(
            "alphabet too small for distinct rows and columns".into(),
        ));
    }
    let mut rng = RngStream::new(seed);
    'attempt: for _ in 0..ROW_RETRY_BUDGET {
        let mut data = vec![0u32; n_rows * n_cols];
        let mut dedup: HashMap<u64, Vec<usize>> = HashMap::new();
        for i in 0..n_rows {
            let mut done = false;
            for _ in 0..ROW_RETRY_BUDGET {
                for x in 0..n_cols {
                    data[i * n_cols + x] = rng.gen_index(alphabet as usize) as u32;
                }
                if insert_unique(&data, n_cols, i, &mut dedup) {
                    done = true;
                    break;
                }
            }
            if !done {
                continue 'attempt;
            }
        }
        if first_duplicate_column(&data, n_rows, n_cols).is_some() {
            continue 'attempt;
        }
        let rows = (0..n_rows)
            .map(|i| data[i * n_cols..(i + 1) * n_cols].to_vec())
            .collect();
        return HypothesisMatrix::from_rows(rows);
    }
    Err(LrcError::GenerationFailed("rows"))
}

fn different_value(current: u32, alphabet: u32, rng: &mut RngStream) -> u32 {
    debug_assert!(alphabet >= 2);
    let draw = rng.gen_index(alphabet as usize - 1) as u32;
    if draw >= current {
        draw + 1
    } else {
        draw
    }
}

/// True if `alphabet^exponent >= need` without overflowing.
fn count_feasible(alphabet: u128, exponent: usize, need: usize) -> bool {
    let need = need as u128;
    let mut acc: u128 = 1;
    for _ in 0..exponent {
        acc = acc.saturating_mul(alphabet);
        if acc >= need {
            return true;
        }
    }
    acc >= need
}

/// Registers row `i` in the dedup index; false if an identical earlier row
/// exists (the entry is not registered so the row can be redrawn).
fn insert_unique(
    data: &[u32],
    m: usize,
    i: usize,
    dedup: &mut HashMap<u64, Vec<usize>>,
) -> bool {
    let row = &data[i * m..(i + 1) * m];
    let mut hasher = DefaultHasher::new();
    row.hash(&mut hasher);
    let key = hasher.finish();
    if let Some(prev) = dedup.get(&key) {
        for &pr in prev {
            if &data[pr * m..(pr + 1) * m] == row {
                return false;
            }
        }
    }
    dedup.entry(key).or_default().push(i);
    true
}

fn first_duplicate_column(data: &[u32], n: usize, m: usize) -> Option<(usize, usize)> {
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    for j in 0..m {
        let mut hasher = DefaultHasher::new();
        for i in 0..n {
            data[i * m + j].hash(&mut hasher);
        }
        let key = hasher.finish();
        if let Some(prev) = seen.get(&key) {
            for &pj in prev {
                if (0..n).all(|i| data[i * m + pj] == data[i * m + j]) {
                    return Some((pj, j));
                }
            }
        }
        seen.entry(key).or_default().push(j);
    }
    None
}
