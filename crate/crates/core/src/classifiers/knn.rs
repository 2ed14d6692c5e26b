use serde::{Deserialize, Serialize};

use super::interval::{nearest_indices, vote, VoteTieBreak};
use super::Classifier;
use crate::dataset::OrdinalDataset;

/// Plain euclidean k-nearest-neighbour majority vote; ties go to the lower class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub training: OrdinalDataset,
}

impl KnnModel {
    pub fn fit(ds: &OrdinalDataset, k: usize) -> Self {
        KnnModel {
            k: k.max(1),
            training: ds.clone(),
        }
    }

    /// Prediction that ignores training instance `skip` (leave-one-out).
    pub fn predict_excluding(&self, x: &[f64], skip: Option<usize>) -> usize {
        let near = nearest_indices(&self.training, x, self.k, |i| Some(i) != skip);
        vote(
            near.iter().map(|&i| self.training.label(i)),
            self.training.class_count(),
            VoteTieBreak::Lower,
        )
        .unwrap_or(0)
    }
}

impl Classifier for KnnModel {
    fn predict(&self, x: &[f64]) -> usize {
        self.predict_excluding(x, None)
    }
}
