//! Monotonic noise filters. Each one maps a dataset to the indices it keeps,
//! never touching features or labels of the kept rows.

mod menn;
mod minffc;
mod mipf;
mod mrnge;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::TreeParams;
use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};

pub use menn::menn;
pub use minffc::{minffc, MinffcParams};
pub use mipf::{mipf, MipfParams};
pub use mrnge::{gabriel_graph, mrnge};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub removed: usize,
    pub good: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub filter_name: String,
    /// Ascending.
    pub kept: Vec<usize>,
    /// Ascending.
    pub removed: Vec<usize>,
    pub iterations: Vec<IterationRecord>,
    pub parameters: BTreeMap<String, String>,
}

impl FilterReport {
    pub(crate) fn from_removed_mask(
        filter_name: &str,
        removed_mask: &[bool],
        iterations: Vec<IterationRecord>,
        parameters: BTreeMap<String, String>,
    ) -> Self {
        let (mut kept, mut removed) = (Vec::new(), Vec::new());
        for (i, &r) in removed_mask.iter().enumerate() {
            if r {
                removed.push(i);
            } else {
                kept.push(i);
            }
        }
        FilterReport {
            filter_name: filter_name.to_string(),
            kept,
            removed,
            iterations,
            parameters,
        }
    }

    /// The input restricted to the kept rows, order preserved.
    pub fn apply(&self, ds: &OrdinalDataset) -> Result<OrdinalDataset> {
        ds.subset(&self.kept)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Menn,
    Mrnge,
    Mipf,
    Minffc,
}

impl FilterKind {
    pub const ALL: [FilterKind; 4] = [FilterKind::Menn, FilterKind::Mrnge, FilterKind::Mipf, FilterKind::Minffc];

    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Menn => "menn",
            FilterKind::Mrnge => "mrnge",
            FilterKind::Mipf => "mipf",
            FilterKind::Minffc => "minffc",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "menn" => FilterKind::Menn,
            "mrnge" => FilterKind::Mrnge,
            "mipf" => FilterKind::Mipf,
            "minffc" => FilterKind::Minffc,
            other => return Err(Error::InvalidParameter(format!("unknown filter {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    /// MENN neighbourhood size.
    pub menn_k: usize,
    pub mipf: MipfParams,
    pub minffc: MinffcParams,
    /// Seeds fold shuffling in the partition-based filters.
    pub seed: u64,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            menn_k: 3,
            mipf: MipfParams::default(),
            minffc: MinffcParams::default(),
            seed: 0,
        }
    }
}

pub fn run_filter(kind: FilterKind, ds: &OrdinalDataset, params: &FilterParams) -> Result<FilterReport> {
    match kind {
        FilterKind::Menn => menn(ds, params.menn_k),
        FilterKind::Mrnge => mrnge(ds),
        FilterKind::Mipf => mipf(ds, &params.mipf, params.seed),
        FilterKind::Minffc => minffc(ds, &params.minffc, params.seed),
    }
}

/// Shuffles `items` and deals them into `parts` folds whose sizes differ by
/// at most one. `parts` is capped at `items.len()`.
pub(crate) fn split_folds(items: &[usize], parts: usize, seed: u64) -> Vec<Vec<usize>> {
    let parts = parts.min(items.len()).max(1);
    let mut order = items.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::new(); parts];
    for (p, i) in order.into_iter().enumerate() {
        folds[p % parts].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds
}

/// Everything in `folds` except fold `skip`, ascending.
pub(crate) fn complement(folds: &[Vec<usize>], skip: usize) -> Vec<usize> {
    let mut out: Vec<usize> = folds
        .iter()
        .enumerate()
        .filter(|(f, _)| *f != skip)
        .flat_map(|(_, v)| v.iter().copied())
        .collect();
    out.sort_unstable();
    out
}

pub(crate) fn tree_params_entries(map: &mut BTreeMap<String, String>, tree: &TreeParams) {
    map.insert("confidence".into(), tree.confidence.to_string());
    map.insert("min_leaf".into(), tree.min_leaf.to_string());
}
