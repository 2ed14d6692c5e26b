use serde::{Deserialize, Serialize};

use super::tree::argmax;
use super::Classifier;
use crate::dataset::OrdinalDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
    /// L2 penalty on the weights (not the bias).
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            learning_rate: 0.5,
            max_epochs: 1000,
            tolerance: 1e-6,
            l2: 1e-4,
        }
    }
}

/// One-vs-rest logistic regression on standardized features, fitted by
/// full-batch gradient ascent from zero weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// Per class: bias followed by one weight per feature.
    pub weights: Vec<Vec<f64>>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl LogisticModel {
    pub fn fit(ds: &OrdinalDataset, params: &LogisticParams) -> Self {
        let n = ds.len();
        let f = ds.feature_count();
        let c = ds.class_count();
        let mut mean = vec![0.0; f];
        for x in ds.instances() {
            for (m, v) in mean.iter_mut().zip(&x.features) {
                *m += v / n as f64;
            }
        }
        let mut scale = vec![0.0; f];
        for x in ds.instances() {
            for j in 0..f {
                scale[j] += (x.features[j] - mean[j]).powi(2) / n as f64;
            }
        }
        for s in &mut scale {
            *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
        }
        let rows: Vec<Vec<f64>> = ds
            .instances()
            .iter()
            .map(|x| (0..f).map(|j| (x.features[j] - mean[j]) / scale[j]).collect())
            .collect();

        let mut weights = vec![vec![0.0; f + 1]; c];
        let mut grad = vec![0.0; f + 1];
        for (class, w) in weights.iter_mut().enumerate() {
            for _ in 0..params.max_epochs {
                grad.iter_mut().for_each(|g| *g = 0.0);
                for (row, x) in rows.iter().zip(ds.instances()) {
                    let z = w[0] + row.iter().zip(&w[1..]).map(|(a, b)| a * b).sum::<f64>();
                    let target = if x.label == class { 1.0 } else { 0.0 };
                    let err = target - sigmoid(z);
                    grad[0] += err;
                    for j in 0..f {
                        grad[j + 1] += err * row[j];
                    }
                }
                let mut step = 0.0f64;
                for j in 0..=f {
                    let mut g = grad[j] / n as f64;
                    if j > 0 {
                        g -= params.l2 * w[j];
                    }
                    let delta = params.learning_rate * g;
                    w[j] += delta;
                    step = step.max(delta.abs());
                }
                if step < params.tolerance {
                    break;
                }
            }
        }
        LogisticModel { mean, scale, weights }
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| {
                let z = w[0]
                    + x.iter()
                        .enumerate()
                        .map(|(j, v)| (v - self.mean[j]) / self.scale[j] * w[j + 1])
                        .sum::<f64>();
                sigmoid(z)
            })
            .collect()
    }
}

impl Classifier for LogisticModel {
    fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}
