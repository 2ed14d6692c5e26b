use serde::{Deserialize, Serialize};

use super::interval::nearest_indices;
use super::Classifier;
use crate::dataset::{is_clash, weakly_below, OrdinalDataset};

/// Ordinal learning model: a consistent, non-redundant subset of the training
/// data and a max-over-dominated-members decision rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OlmModel {
    /// Training indices forming the rule base, in dataset order.
    pub members: Vec<usize>,
    pub rules: OrdinalDataset,
}

impl OlmModel {
    pub fn fit(ds: &OrdinalDataset) -> Self {
        // conservative resolution: the first-seen instance wins a conflict
        let mut members: Vec<usize> = Vec::new();
        for i in 0..ds.len() {
            let (xi, yi) = (ds.features(i), ds.label(i));
            if members.iter().all(|&j| !is_clash(xi, yi, ds.features(j), ds.label(j))) {
                members.push(i);
            }
        }
        // drop x_i when another member x_j <= x_i carries the same label
        let mut keep = vec![true; members.len()];
        for a in 0..members.len() {
            let i = members[a];
            let redundant = members.iter().enumerate().any(|(b, &j)| {
                b != a && keep[b] && ds.label(j) == ds.label(i) && weakly_below(ds.features(j), ds.features(i))
            });
            if redundant {
                keep[a] = false;
            }
        }
        let members: Vec<usize> = members
            .into_iter()
            .zip(keep)
            .filter_map(|(i, k)| k.then_some(i))
            .collect();
        let rules = ds.subset(&members).expect("first instance is always a member");
        OlmModel { members, rules }
    }

    /// Largest label among members below `x`, or `None` if no member is.
    pub fn dominated_max(&self, x: &[f64]) -> Option<usize> {
        self.rules
            .instances()
            .iter()
            .filter(|m| weakly_below(&m.features, x))
            .map(|m| m.label)
            .max()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        match self.dominated_max(x) {
            Some(y) => y,
            None => {
                let nn = nearest_indices(&self.rules, x, 1, |_| true);
                self.rules.label(nn[0])
            }
        }
    }
}

impl Classifier for OlmModel {
    fn predict(&self, x: &[f64]) -> usize {
        OlmModel::predict(self, x)
    }
}
