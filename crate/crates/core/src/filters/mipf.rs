use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{complement, split_folds, tree_params_entries, FilterReport, IterationRecord};
use crate::classifiers::{Classifier, OrdinalC45, TreeParams};
use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::par;
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MipfParams {
    /// Number of subsets (Γ).
    pub partitions: usize,
    /// Stop once fewer than `p * |T|` instances are flagged.
    pub p: f64,
    /// Good instances moved to the retained pool per iteration; `None` means
    /// `ceil(0.01 * n)` for the input size `n`.
    pub y_good: Option<usize>,
    /// Consecutive quiet iterations required before stopping.
    pub g: usize,
    pub tree: TreeParams,
    pub max_iterations: usize,
}

impl Default for MipfParams {
    fn default() -> Self {
        MipfParams {
            partitions: 5,
            p: 0.01,
            y_good: None,
            g: 1,
            tree: TreeParams::default(),
            max_iterations: 100,
        }
    }
}

/// Indices of `working` misclassified by every ordinal C4.5 trained on a
/// leave-one-fold-out complement (consensus vote).
fn consensus_noisy(ds: &OrdinalDataset, working: &[usize], params: &MipfParams, seed: u64) -> Result<Vec<bool>> {
    let folds = split_folds(working, params.partitions, seed);
    let models = par::map_range(folds.len(), |f| {
        ds.subset(&complement(&folds, f)).map(|train| OrdinalC45::fit(&train, &params.tree))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(working
        .iter()
        .map(|&t| {
            let x = ds.instance(t);
            models.iter().all(|m| m.predict(&x.features) != x.label)
        })
        .collect())
}

/// Monotonic iterative partitioning filter.
pub fn mipf(ds: &OrdinalDataset, params: &MipfParams, seed: u64) -> Result<FilterReport> {
    if params.partitions < 2 {
        return Err(Error::InvalidParameter("mipf needs at least 2 partitions".into()));
    }
    let n = ds.len();
    let y_good = params.y_good.unwrap_or((0.01 * n as f64).ceil() as usize);
    let mut working: Vec<usize> = (0..n).collect();
    let mut removed = vec![false; n];
    let mut iterations = Vec::new();
    let mut quiet_left = params.g.max(1);
    for round in 0..params.max_iterations.max(1) {
        if working.len() < 2 {
            break;
        }
        let noisy = consensus_noisy(ds, &working, params, derive_seed(seed, &[round as u64]))?;
        let mut next = Vec::with_capacity(working.len());
        let (mut flagged, mut good) = (0, 0);
        for (&t, &is_noisy) in working.iter().zip(&noisy) {
            if is_noisy {
                removed[t] = true;
                flagged += 1;
            } else if good < y_good {
                // retained for the output, no longer part of T
                good += 1;
            } else {
                next.push(t);
            }
        }
        working = next;
        iterations.push(IterationRecord { removed: flagged, good });
        if (flagged as f64) < params.p * working.len() as f64 {
            quiet_left -= 1;
        } else {
            quiet_left = params.g.max(1);
        }
        if quiet_left == 0 {
            break;
        }
    }
    let mut map = BTreeMap::from([
        ("partitions".to_string(), params.partitions.to_string()),
        ("p".to_string(), params.p.to_string()),
        ("y_good".to_string(), y_good.to_string()),
        ("g".to_string(), params.g.to_string()),
        ("scheme".to_string(), "consensus".to_string()),
        ("seed".to_string(), seed.to_string()),
    ]);
    tree_params_entries(&mut map, &params.tree);
    Ok(FilterReport::from_removed_mask("mipf", &removed, iterations, map))
}
