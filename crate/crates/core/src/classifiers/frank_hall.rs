//! Ordinal C4.5 via the Frank-Hall decomposition: one binary tree per
//! threshold `y > k`, recombined into class probabilities.

use serde::{Deserialize, Serialize};

use super::tree::{argmax, DecisionTree, TreeParams};
use super::Classifier;
use crate::dataset::OrdinalDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrdinalC45 {
    pub class_count: usize,
    /// Tree `k` estimates `P(y > k)`.
    pub trees: Vec<DecisionTree>,
}

impl OrdinalC45 {
    pub fn fit(ds: &OrdinalDataset, params: &TreeParams) -> Self {
        let c = ds.class_count();
        let labels = ds.labels();
        let trees = (0..c - 1)
            .map(|k| {
                let binary: Vec<usize> = labels.iter().map(|&y| usize::from(y > k)).collect();
                DecisionTree::fit_labels(ds, &binary, 2, params)
            })
            .collect();
        OrdinalC45 { class_count: c, trees }
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let above: Vec<f64> = self
            .trees
            .iter()
            .map(|t| {
                let counts = t.leaf_counts(x);
                let total = counts[0] + counts[1];
                if total > 0.0 {
                    counts[1] / total
                } else {
                    0.0
                }
            })
            .collect();
        let c = self.class_count;
        (0..c)
            .map(|j| {
                let lower = if j == 0 { 1.0 } else { above[j - 1] };
                let upper = if j == c - 1 { 0.0 } else { above[j] };
                lower - upper
            })
            .collect()
    }
}

impl Classifier for OrdinalC45 {
    fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.probabilities(x))
    }
}
