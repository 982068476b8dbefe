//! Flat key-value experiment configuration.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::arbitrary::SelectionStrategy;
use crate::LrcError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Majority,
    Randomized,
    Arbitrary,
}

impl Algorithm {
    pub fn parse(text: &str) -> Result<Self, LrcError> {
        match text {
            "majority" => Ok(Algorithm::Majority),
            "randomized" => Ok(Algorithm::Randomized),
            "arbitrary" => Ok(Algorithm::Arbitrary),
            other => Err(LrcError::InvalidConfig(format!("unknown algorithm '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Majority => "majority",
            Algorithm::Randomized => "randomized",
            Algorithm::Arbitrary => "arbitrary",
        }
    }
}

/// Where the concept class comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSpec {
    Clustered {
        columns: usize,
        hypotheses: usize,
        clusters: usize,
        max_flips: usize,
        alphabet: u32,
        dataset_seed: Option<u64>,
    },
    Random { hypotheses: usize, columns: usize, alphabet: u32 },
    Identity { size: usize },
    TightBound { n: usize },
    File { path: PathBuf },
}

/// Where a probability vector comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistSpec {
    Uniform,
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self, LrcError> {
        match text {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(LrcError::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// One experiment: algorithm, dataset, distributions, approximation
/// parameters, trial count and seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub dataset: DatasetSpec,
    pub p: DistSpec,
    pub q: DistSpec,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub strategy: Option<SelectionStrategy>,
    pub trials: usize,
    pub seed: u64,
    pub max_rounds: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

const KNOWN_KEYS: &[&str] = &[
    "algorithm",
    "dataset",
    "columns",
    "hypotheses",
    "clusters",
    "max_flips",
    "alphabet",
    "dataset_seed",
    "n",
    "matrix_file",
    "p_dist",
    "p_file",
    "q_dist",
    "q_file",
    "epsilon",
    "delta",
    "strategy",
    "trials",
    "seed",
    "max_rounds",
    "out",
    "format",
];

impl ExperimentConfig {
    pub fn parse_file(path: &Path) -> Result<Self, LrcError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            LrcError::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse_str(&text)
    }

    /// Parses `key = value` lines; blank lines and lines starting with `#`
    /// are ignored. Unknown keys are rejected.
    pub fn parse_str(text: &str) -> Result<Self, LrcError> {
        let mut map: HashMap<String, String> = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                LrcError::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(LrcError::InvalidConfig(format!("unknown key '{key}'")));
            }
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(LrcError::InvalidConfig(format!("duplicate key '{key}'")));
            }
        }
        Self::from_map(&map)
    }

    fn from_map(map: &HashMap<String, String>) -> Result<Self, LrcError> {
        let get = |k: &str| map.get(k).map(|s| s.as_str());
        let require = |k: &str| {
            get(k).ok_or_else(|| LrcError::InvalidConfig(format!("missing key '{k}'")))
        };
        let parse_usize = |k: &str| -> Result<usize, LrcError> {
            require(k)?.parse().map_err(|e| {
                LrcError::InvalidConfig(format!("bad value for '{k}': {e}"))
            })
        };
        let parse_f64 = |k: &str| -> Result<f64, LrcError> {
            require(k)?.parse().map_err(|e| {
                LrcError::InvalidConfig(format!("bad value for '{k}': {e}"))
            })
        };

        let algorithm = Algorithm::parse(require("algorithm")?)?;
        let dataset = match require("dataset")? {
            "clustered" => DatasetSpec::Clustered {
                columns: parse_usize("columns")?,
                hypotheses: parse_usize("hypotheses")?,
                clusters: parse_usize("clusters")?,
                max_flips: parse_usize("max_flips")?,
                alphabet: get("alphabet")
                    .map(|s| s.parse::<u32>())
                    .transpose()
                    .map_err(|e| LrcError::InvalidConfig(format!("bad alphabet: {e}")))?
                    .unwrap_or(2),
                dataset_seed: get("dataset_seed")
                    .map(|s| s.parse::<u64>())
                    .transpose()
                    .map_err(|e| LrcError::InvalidConfig(format!("bad dataset_seed: {e}")))?,
            },
            "random" => DatasetSpec::Random {
                hypotheses: parse_usize("hypotheses")?,
                columns: parse_usize("columns")?,
                alphabet: get("alphabet")
                    .map(|s| s.parse::<u32>())
                    .transpose()
                    .map_err(|e| LrcError::InvalidConfig(format!("bad alphabet: {e}")))?
                    .unwrap_or(2),
            },
            "identity" => DatasetSpec::Identity { size: parse_usize("hypotheses")? },
            "tight_bound" => DatasetSpec::TightBound { n: parse_usize("n")? },
            "file" => DatasetSpec::File { path: PathBuf::from(require("matrix_file")?) },
            other => {
                return Err(LrcError::InvalidConfig(format!("unknown dataset '{other}'")));
            }
        };
        let p = match get("p_dist").unwrap_or("uniform") {
            "uniform" => DistSpec::Uniform,
            "file" => DistSpec::File(PathBuf::from(require("p_file")?)),
            other => {
                return Err(LrcError::InvalidConfig(format!("unknown p_dist '{other}'")));
            }
        };
        let q = match get("q_dist").unwrap_or("uniform") {
            "uniform" => DistSpec::Uniform,
            "file" => DistSpec::File(PathBuf::from(require("q_file")?)),
            other => {
                return Err(LrcError::InvalidConfig(format!("unknown q_dist '{other}'")));
            }
        };
        let cfg = ExperimentConfig {
            algorithm,
            dataset,
            p,
            q,
            epsilon: get("epsilon")
                .map(|s| s.parse::<f64>())
                .transpose()
                .map_err(|e| LrcError::InvalidConfig(format!("bad epsilon: {e}")))?,
            delta: get("delta")
                .map(|s| s.parse::<f64>())
                .transpose()
                .map_err(|e| LrcError::InvalidConfig(format!("bad delta: {e}")))?,
            strategy: get("strategy").map(SelectionStrategy::parse).transpose()?,
            trials: parse_usize("trials")?,
            seed: get("seed")
                .map(|s| s.parse::<u64>())
                .transpose()
                .map_err(|e| LrcError::InvalidConfig(format!("bad seed: {e}")))?
                .unwrap_or(0),
            max_rounds: get("max_rounds")
                .map(|s| s.parse::<usize>())
                .transpose()
                .map_err(|e| LrcError::InvalidConfig(format!("bad max_rounds: {e}")))?,
            out: get("out").map(PathBuf::from),
            format: get("format").map(OutputFormat::parse).transpose()?.unwrap_or(OutputFormat::Csv),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Per-algorithm required fields and parameter domains.
    pub fn validate(&self) -> Result<(), LrcError> {
        if self.trials == 0 {
            return Err(LrcError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.algorithm == Algorithm::Arbitrary {
            let eps = self.epsilon.ok_or_else(|| {
                LrcError::InvalidConfig("arbitrary runs need epsilon".into())
            })?;
            let delta = self.delta.ok_or_else(|| {
                LrcError::InvalidConfig("arbitrary runs need delta".into())
            })?;
            if !(eps > 0.0 && eps < 1.0) {
                return Err(LrcError::InvalidConfig(format!("epsilon {eps} not in (0,1)")));
            }
            if !(delta > 0.0 && delta < 1.0) {
                return Err(LrcError::InvalidConfig(format!("delta {delta} not in (0,1)")));
            }
            if self.strategy.is_none() {
                return Err(LrcError::InvalidConfig("arbitrary runs need a strategy".into()));
            }
        }
        Ok(())
    }

    /// Resolved key-value view embedded in every output for provenance.
    pub fn resolved_pairs(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| pairs.push((k.to_string(), v));
        push("algorithm", self.algorithm.name().to_string());
        match &self.dataset {
            DatasetSpec::Clustered {
                columns,
                hypotheses,
                clusters,
                max_flips,
                alphabet,
                dataset_seed,
            } => {
                push("dataset", "clustered".into());
                push("columns", columns.to_string());
                push("hypotheses", hypotheses.to_string());
                push("clusters", clusters.to_string());
                push("max_flips", max_flips.to_string());
                push("alphabet", alphabet.to_string());
                if let Some(s) = dataset_seed {
                    push("dataset_seed", s.to_string());
                }
            }
            DatasetSpec::Random { hypotheses, columns, alphabet } => {
                push("dataset", "random".into());
                push("hypotheses", hypotheses.to_string());
                push("columns", columns.to_string());
                push("alphabet", alphabet.to_string());
            }
            DatasetSpec::Identity { size } => {
                push("dataset", "identity".into());
                push("hypotheses", size.to_string());
            }
            DatasetSpec::TightBound { n } => {
                push("dataset", "tight_bound".into());
                push("n", n.to_string());
            }
            DatasetSpec::File { path } => {
                push("dataset", "file".into());
                push("matrix_file", path.display().to_string());
            }
        }
        push(
            "p_dist",
            match &self.p {
                DistSpec::Uniform => "uniform".into(),
                DistSpec::File(p) => format!("file:{}", p.display()),
            },
        );
        if self.algorithm == Algorithm::Randomized {
            push(
                "q_dist",
                match &self.q {
                    DistSpec::Uniform => "uniform".into(),
                    DistSpec::File(p) => format!("file:{}", p.display()),
                },
            );
            push("target_draw", "prior".into());
        } else {
            push("target_draw", "uniform".into());
        }
        if let Some(e) = self.epsilon {
            push("epsilon", e.to_string());
        }
        if let Some(d) = self.delta {
            push("delta", d.to_string());
        }
        if let Some(s) = &self.strategy {
            push("strategy", s.name());
        }
        push("trials", self.trials.to_string());
        push("seed", self.seed.to_string());
        if let Some(mr) = self.max_rounds {
            push("max_rounds", mr.to_string());
        }
        push("format", self.format.name().to_string());
        pairs
    }
}
