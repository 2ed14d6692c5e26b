//! Cross-validation experiment driver.
//!
//! Every (dataset, noise level, noise seed, fold, preprocessing) combination
//! is an independent unit: noise goes into the training fold only, the
//! preprocessing runs once on it and every classifier is then fitted on the
//! result and scored on the untouched test fold.

mod measures;
mod report;
mod stats;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{Classifier, ClassifierKind, ClassifierParams, Model};
use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::filters::{run_filter, FilterKind, FilterParams};
use crate::io::{load_dataset, DataFormat};
use crate::metrics::{compute_report, MonotonicitySummary};
use crate::noise::inject_noise;
use crate::relabel::relabel;
use crate::seed::{derive_seed, hash_str};
use crate::{par, synth};

pub use measures::{accuracy, filter_decision_stats, fold_assignment, mae, FilterAudit};
pub use report::{
    markdown_summary, rank_tables, read_records_csv, records_to_csv, write_outputs, Metric, RankKey,
};
pub use stats::{block_ranks, friedman_holm, Direction, HolmComparison, RankTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Preprocessing {
    None,
    Relabel,
    Filter(FilterKind),
}

impl Preprocessing {
    pub const ALL: [Preprocessing; 6] = [
        Preprocessing::None,
        Preprocessing::Relabel,
        Preprocessing::Filter(FilterKind::Menn),
        Preprocessing::Filter(FilterKind::Mrnge),
        Preprocessing::Filter(FilterKind::Mipf),
        Preprocessing::Filter(FilterKind::Minffc),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preprocessing::None => "none",
            Preprocessing::Relabel => "relabel",
            Preprocessing::Filter(f) => f.name(),
        }
    }
}

impl fmt::Display for Preprocessing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preprocessing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Preprocessing::None),
            "relabel" => Ok(Preprocessing::Relabel),
            other => other.parse().map(Preprocessing::Filter),
        }
    }
}

impl TryFrom<String> for Preprocessing {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Preprocessing> for String {
    fn from(p: Preprocessing) -> String {
        p.name().to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Benchmark names (`era`, `esl`, `lev`, `swd`) or dataset file paths.
    pub datasets: Vec<String>,
    pub noise_levels: Vec<f64>,
    pub seeds: Vec<u64>,
    pub preprocessings: Vec<Preprocessing>,
    pub classifiers: Vec<ClassifierKind>,
    pub folds: usize,
    /// Seeds the fold assignment of every dataset.
    pub fold_seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Worker threads; 0 lets the runtime decide.
    pub workers: usize,
    pub filter: FilterParams,
    pub classifier: ClassifierParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: synth::BENCHMARKS.iter().map(|s| s.to_string()).collect(),
            noise_levels: vec![0.0, 0.1, 0.2, 0.3],
            seeds: vec![1, 2, 3],
            preprocessings: Preprocessing::ALL.to_vec(),
            classifiers: ClassifierKind::MONOTONIC.to_vec(),
            folds: 10,
            fold_seed: 0,
            output_dir: None,
            workers: 0,
            filter: FilterParams::default(),
            classifier: ClassifierParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("datasets", self.datasets.is_empty()),
            ("noise_levels", self.noise_levels.is_empty()),
            ("seeds", self.seeds.is_empty()),
            ("preprocessings", self.preprocessings.is_empty()),
            ("classifiers", self.classifiers.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::InvalidParameter(format!("{name} must not be empty")));
        }
        if self.noise_levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidParameter("noise levels must lie in [0, 1]".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidParameter("need at least 2 folds".into()));
        }
        Ok(())
    }

    /// Number of records a run produces.
    pub fn expected_records(&self) -> usize {
        self.datasets.len()
            * self.noise_levels.len()
            * self.seeds.len()
            * self.folds
            * self.preprocessings.len()
            * self.classifiers.len()
    }
}

/// Resolves a dataset entry: a bundled benchmark name or a file path.
pub fn resolve_dataset(entry: &str, base_dir: Option<&Path>) -> Result<OrdinalDataset> {
    if synth::BENCHMARKS.contains(&entry.to_ascii_lowercase().as_str()) {
        return synth::benchmark(entry);
    }
    let mut path = PathBuf::from(entry);
    if path.is_relative() {
        if let Some(base) = base_dir {
            path = base.join(path);
        }
    }
    let format = DataFormat::from_path(&path);
    load_dataset(&path, format)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub noise_level: f64,
    pub noise_seed: u64,
    pub preprocessing: Preprocessing,
    pub classifier: ClassifierKind,
    pub fold: usize,
    pub accuracy: f64,
    pub mae: f64,
    /// Monotonicity of the training set the classifier was fitted on.
    pub train_monotonicity: MonotonicitySummary,
    /// Present when noise was injected.
    pub filter_audit: Option<FilterAudit>,
}

struct Unit {
    dataset: usize,
    level: usize,
    seed: usize,
    fold: usize,
    preprocessing: usize,
}

/// Runs the experiment on already-loaded `(name, dataset)` pairs.
pub fn run_on(datasets: &[(String, OrdinalDataset)], config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let mut assignments = Vec::with_capacity(datasets.len());
    for (name, ds) in datasets {
        let (folds, stratified) = fold_assignment(&ds.labels(), config.folds, derive_seed(config.fold_seed, &[hash_str(name)]))?;
        if !stratified {
            log::warn!("{name}: a class has fewer than {} members, using unstratified folds", config.folds);
        }
        assignments.push(folds);
    }
    let mut units = Vec::new();
    for dataset in 0..datasets.len() {
        for level in 0..config.noise_levels.len() {
            for seed in 0..config.seeds.len() {
                for fold in 0..config.folds {
                    for preprocessing in 0..config.preprocessings.len() {
                        units.push(Unit {
                            dataset,
                            level,
                            seed,
                            fold,
                            preprocessing,
                        });
                    }
                }
            }
        }
    }
    let run = || {
        par::map_range(units.len(), |u| run_unit(&units[u], datasets, &assignments, config))
            .into_iter()
            .collect::<Result<Vec<_>>>()
    };
    let nested = with_workers(config.workers, run)??;
    Ok(nested.into_iter().flatten().collect())
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T: Send>(_workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(f())
}

/// Loads every configured dataset and runs the experiment.
pub fn run_experiment(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Vec<ExperimentRecord>> {
    let datasets = config
        .datasets
        .iter()
        .map(|d| resolve_dataset(d, base_dir).map(|ds| (d.clone(), ds)))
        .collect::<Result<Vec<_>>>()?;
    run_on(&datasets, config)
}

fn run_unit(
    unit: &Unit,
    datasets: &[(String, OrdinalDataset)],
    assignments: &[Vec<usize>],
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentRecord>> {
    let (name, ds) = &datasets[unit.dataset];
    let folds = &assignments[unit.dataset];
    let level = config.noise_levels[unit.level];
    let noise_seed = config.seeds[unit.seed];
    let preprocessing = config.preprocessings[unit.preprocessing];
    let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| folds[i] != unit.fold).collect();
    let test_idx: Vec<usize> = (0..ds.len()).filter(|&i| folds[i] == unit.fold).collect();
    let train = ds.subset(&train_idx)?;
    let test = ds.subset(&test_idx)?;

    let key = [hash_str(name), level.to_bits(), unit.fold as u64];
    let (noisy, mask) = if level > 0.0 {
        let (noisy, mask) = inject_noise(&train, level, derive_seed(noise_seed, &key))?;
        (noisy, Some(mask))
    } else {
        (train, None)
    };

    let (prepared, audit) = match preprocessing {
        Preprocessing::None => {
            let audit = mask.as_ref().map(|m| FilterAudit {
                noisy_kept: m.corrupted_indices.len(),
                clean_kept: noisy.len() - m.corrupted_indices.len(),
                ..FilterAudit::default()
            });
            (noisy, audit)
        }
        Preprocessing::Relabel => {
            let audit = mask.as_ref().map(|m| FilterAudit {
                noisy_kept: m.corrupted_indices.len(),
                clean_kept: noisy.len() - m.corrupted_indices.len(),
                ..FilterAudit::default()
            });
            (relabel(&noisy)?.dataset, audit)
        }
        Preprocessing::Filter(kind) => {
            let mut params = config.filter.clone();
            params.seed = derive_seed(noise_seed, &[key[0], key[1], key[2], hash_str(kind.name())]);
            let report = run_filter(kind, &noisy, &params)?;
            let audit = mask.as_ref().map(|m| filter_decision_stats(&report, m));
            if report.kept.is_empty() {
                log::warn!("{name} fold {}: {kind} removed every instance, training on the unfiltered fold", unit.fold);
                (noisy, audit)
            } else {
                (report.apply(&noisy)?, audit)
            }
        }
    };
    let monotonicity = compute_report(&prepared).summary();
    let truths = test.labels();

    let mut records = Vec::with_capacity(config.classifiers.len());
    for &kind in &config.classifiers {
        let mut params = config.classifier.clone();
        params.seed = derive_seed(noise_seed, &[key[0], key[1], key[2], hash_str(kind.name())]);
        let model = Model::fit(kind, &prepared, &params)?;
        let preds = model.predict_dataset(&test);
        records.push(ExperimentRecord {
            dataset: name.clone(),
            noise_level: level,
            noise_seed,
            preprocessing,
            classifier: kind,
            fold: unit.fold,
            accuracy: accuracy(&preds, &truths)?,
            mae: mae(&preds, &truths)?,
            train_monotonicity: monotonicity,
            filter_audit: audit,
        });
    }
    log::debug!(
        "{name} level {level} seed {noise_seed} fold {} {preprocessing}: done",
        unit.fold
    );
    Ok(records)
}
