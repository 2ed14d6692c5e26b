use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{complement, split_folds, tree_params_entries, FilterReport, IterationRecord};
use crate::classifiers::{nearest_indices, Classifier, KnnModel, LogisticModel, LogisticParams, OrdinalC45, TreeParams};
use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::metrics::{nclash, nmi1_contribution};
use crate::par;
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinffcParams {
    /// Number of subsets (Γ).
    pub partitions: usize,
    /// An iteration is quiet when it removes fewer than `p * |T|` instances.
    pub p: f64,
    /// Consecutive quiet iterations before stopping; 0 runs a single iteration.
    pub g: usize,
    /// Neighbours consulted by the noise score.
    pub k: usize,
    /// Instances scoring strictly above this are removed.
    pub threshold: f64,
    pub tree: TreeParams,
    pub logistic: LogisticParams,
    pub max_iterations: usize,
}

impl Default for MinffcParams {
    fn default() -> Self {
        MinffcParams {
            partitions: 3,
            p: 0.01,
            g: 3,
            k: 3,
            threshold: 0.0,
            tree: TreeParams::default(),
            logistic: LogisticParams::default(),
            max_iterations: 50,
        }
    }
}

/// Noise score in [-1, 1]. `noisy_fraction` is the share of ensemble votes
/// against the instance's label, `clean_agreement` the share of its nearest
/// neighbours that are clean and carry the same label.
pub fn noise_score(noisy_fraction: f64, clean_agreement: f64) -> f64 {
    let s = 2.0 * noisy_fraction - 1.0;
    s - clean_agreement * (1.0 + s) / 2.0
}

struct Ensemble {
    tree: OrdinalC45,
    knn: KnnModel,
    logistic: LogisticModel,
}

impl Ensemble {
    fn fit(ds: &OrdinalDataset, params: &MinffcParams) -> Self {
        Ensemble {
            tree: OrdinalC45::fit(ds, &params.tree),
            knn: KnnModel::fit(ds, 3),
            logistic: LogisticModel::fit(ds, &params.logistic),
        }
    }

    fn wrong_votes(&self, x: &[f64], y: usize) -> usize {
        usize::from(self.tree.predict(x) != y) + usize::from(self.knn.predict(x) != y) + usize::from(self.logistic.predict(x) != y)
    }
}

/// Trains one ensemble per leave-one-fold-out complement of `pool` (positions
/// into `ds`). Returns, for each position of `ds`, (wrong votes, total votes):
/// members of `pool` are judged by the ensemble that never saw them, all
/// other positions by every ensemble.
fn fold_votes(ds: &OrdinalDataset, pool: &[usize], params: &MinffcParams, seed: u64) -> Result<Vec<(usize, usize)>> {
    let folds = split_folds(pool, params.partitions, seed);
    let ensembles = par::map_range(folds.len(), |f| ds.subset(&complement(&folds, f)).map(|t| Ensemble::fit(&t, params)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut home = vec![None; ds.len()];
    for (f, fold) in folds.iter().enumerate() {
        for &t in fold {
            home[t] = Some(f);
        }
    }
    Ok(par::map_range(ds.len(), |t| {
        let x = ds.instance(t);
        match home[t] {
            Some(f) => (ensembles[f].wrong_votes(&x.features, x.label), 3),
            None => (
                ensembles.iter().map(|e| e.wrong_votes(&x.features, x.label)).sum(),
                3 * ensembles.len(),
            ),
        }
    }))
}

fn is_noisy((wrong, total): (usize, usize)) -> bool {
    2 * wrong > total
}

/// Returns the positions of `ds` to remove in one filtering round.
fn one_round(ds: &OrdinalDataset, params: &MinffcParams, seed: u64) -> Result<Vec<bool>> {
    let n = ds.len();
    let all: Vec<usize> = (0..n).collect();
    // preliminary filtering
    let first = fold_votes(ds, &all, params, derive_seed(seed, &[0]))?;
    let clean: Vec<usize> = (0..n).filter(|&t| !is_noisy(first[t])).collect();
    // the final ensemble is built from the preliminary clean set
    let votes = if clean.len() >= 2 {
        fold_votes(ds, &clean, params, derive_seed(seed, &[1]))?
    } else {
        first
    };
    let noisy: Vec<bool> = votes.iter().map(|&v| is_noisy(v)).collect();
    Ok(par::map_range(n, |t| {
        let clashes = nclash(ds, t);
        if clashes == 0 {
            return false;
        }
        let x = ds.instance(t);
        let near = nearest_indices(ds, &x.features, params.k, |j| j != t);
        let agreeing = near.iter().filter(|&&j| !noisy[j] && ds.label(j) == x.label).count();
        let agreement = if near.is_empty() { 0.0 } else { agreeing as f64 / near.len() as f64 };
        let (wrong, total) = votes[t];
        let score = noise_score(wrong as f64 / total as f64, agreement) * nmi1_contribution(clashes, n);
        score > params.threshold
    }))
}

/// Monotonic iterative noise filter based on the fusion of classifiers.
pub fn minffc(ds: &OrdinalDataset, params: &MinffcParams, seed: u64) -> Result<FilterReport> {
    if params.partitions < 2 {
        return Err(Error::InvalidParameter("minffc needs at least 2 partitions".into()));
    }
    let n = ds.len();
    let mut working: Vec<usize> = (0..n).collect();
    let mut removed = vec![false; n];
    let mut iterations = Vec::new();
    let mut quiet_left = params.g;
    for round in 0..params.max_iterations.max(1) {
        if working.len() < 2 {
            break;
        }
        let current = ds.subset(&working)?;
        let drop = one_round(&current, params, derive_seed(seed, &[round as u64]))?;
        let mut next = Vec::with_capacity(working.len());
        for (&t, &d) in working.iter().zip(&drop) {
            if d {
                removed[t] = true;
            } else {
                next.push(t);
            }
        }
        let count = working.len() - next.len();
        working = next;
        iterations.push(IterationRecord { removed: count, good: 0 });
        if (count as f64) < params.p * working.len() as f64 {
            quiet_left = quiet_left.saturating_sub(1);
        } else {
            quiet_left = params.g;
        }
        if quiet_left == 0 {
            break;
        }
    }
    let mut map = BTreeMap::from([
        ("partitions".to_string(), params.partitions.to_string()),
        ("p".to_string(), params.p.to_string()),
        ("g".to_string(), params.g.to_string()),
        ("k".to_string(), params.k.to_string()),
        ("threshold".to_string(), params.threshold.to_string()),
        ("scheme".to_string(), "majority".to_string()),
        ("seed".to_string(), seed.to_string()),
    ]);
    tree_params_entries(&mut map, &params.tree);
    Ok(FilterReport::from_removed_mask("minffc", &removed, iterations, map))
}
