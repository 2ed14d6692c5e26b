//! Adjacent-class label noise with cyclic wrap-around.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseMask {
    /// Corrupted positions, ascending.
    pub corrupted_indices: Vec<usize>,
    /// Clean label of every corrupted position.
    pub original_labels: BTreeMap<usize, usize>,
    pub noise_fraction: f64,
    pub seed: u64,
}

impl NoiseMask {
    pub fn empty(noise_fraction: f64, seed: u64) -> Self {
        NoiseMask {
            corrupted_indices: Vec::new(),
            original_labels: BTreeMap::new(),
            noise_fraction,
            seed,
        }
    }

    pub fn is_corrupted(&self, i: usize) -> bool {
        self.original_labels.contains_key(&i)
    }

    /// Puts the clean labels back.
    pub fn restore(&self, ds: &OrdinalDataset) -> Result<OrdinalDataset> {
        let mut labels = ds.labels();
        for (&i, &y) in &self.original_labels {
            if i >= labels.len() {
                return Err(Error::InvalidParameter(format!("mask index {i} out of range")));
            }
            labels[i] = y;
        }
        ds.with_labels(&labels)
    }
}

/// `round(fraction * n)` with halves rounded up.
pub fn corrupted_count(fraction: f64, n: usize) -> usize {
    let exact = fraction * n as f64;
    // guard against 0.3 * 10 = 2.9999999999999996
    let nudged = exact + 1e-9;
    (nudged + 0.5).floor().min(n as f64) as usize
}

/// Moves `round(fraction * n)` uniformly chosen labels one class up or down,
/// wrapping from the top class to the bottom one and vice versa.
pub fn inject_noise(ds: &OrdinalDataset, fraction: f64, seed: u64) -> Result<(OrdinalDataset, NoiseMask)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!(
            "noise fraction {fraction} outside [0, 1]"
        )));
    }
    let c = ds.class_count();
    if c < 2 {
        return Err(Error::InvalidParameter("noise needs at least 2 classes".into()));
    }
    let n = ds.len();
    let count = corrupted_count(fraction, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, count).into_vec();
    picked.sort_unstable();

    let mut labels = ds.labels();
    let mut original = BTreeMap::new();
    for &i in &picked {
        let y = labels[i];
        let up = rng.gen_bool(0.5);
        labels[i] = if up { (y + 1) % c } else { (y + c - 1) % c };
        original.insert(i, y);
    }
    let noisy = ds.with_labels(&labels)?;
    Ok((
        noisy,
        NoiseMask {
            corrupted_indices: picked,
            original_labels: original,
            noise_fraction: fraction,
            seed,
        },
    ))
}
