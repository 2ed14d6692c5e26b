//! Monotonic classifiers and the auxiliary learners used by the filters.
//!
//! Every learner is fitted from an [`OrdinalDataset`] and predicts a class
//! index for a raw feature vector. [`Model`] wraps all of them behind one
//! serializable type so fitted models can be written to JSON and reloaded.

mod frank_hall;
mod interval;
mod knn;
mod logistic;
mod mknn;
mod olm;
mod osdl;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};

pub use frank_hall::OrdinalC45;
pub use interval::{label_interval, label_interval_excluding, nearest_indices, vote, LabelInterval, VoteTieBreak};
pub use knn::KnnModel;
pub use logistic::{LogisticModel, LogisticParams};
pub use mknn::MknnModel;
pub use olm::OlmModel;
pub use osdl::{OsdlModel, OsdlParams};
pub use tree::{DecisionTree, TreeParams};

pub trait Classifier {
    fn predict(&self, x: &[f64]) -> usize;

    fn predict_dataset(&self, ds: &OrdinalDataset) -> Vec<usize> {
        ds.instances().iter().map(|x| self.predict(&x.features)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Mknn,
    Olm,
    Osdl,
    Mid,
    #[serde(rename = "c45")]
    OrdinalC45,
    Knn,
    Logistic,
}

impl ClassifierKind {
    pub const MONOTONIC: [ClassifierKind; 4] = [
        ClassifierKind::Mknn,
        ClassifierKind::Olm,
        ClassifierKind::Osdl,
        ClassifierKind::Mid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Mknn => "mknn",
            ClassifierKind::Olm => "olm",
            ClassifierKind::Osdl => "osdl",
            ClassifierKind::Mid => "mid",
            ClassifierKind::OrdinalC45 => "c45",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Logistic => "logistic",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "mknn" => ClassifierKind::Mknn,
            "olm" => ClassifierKind::Olm,
            "osdl" => ClassifierKind::Osdl,
            "mid" => ClassifierKind::Mid,
            "c45" | "ordinal-c45" | "ordinalc45" => ClassifierKind::OrdinalC45,
            "knn" => ClassifierKind::Knn,
            "logistic" | "lr" => ClassifierKind::Logistic,
            other => return Err(Error::InvalidParameter(format!("unknown classifier {other:?}"))),
        })
    }
}

/// Hyperparameters for every learner, with the usual defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierParams {
    /// MkNN neighbourhood size (k = 3, euclidean).
    pub mknn_k: usize,
    /// Plain kNN neighbourhood size.
    pub knn_k: usize,
    pub osdl: OsdlParams,
    /// MID: confidence = 0.25, 2 items per leaf, R = 1.
    pub mid: TreeParams,
    /// Base trees of the ordinal C4.5: confidence = 0.25, 2 items per leaf.
    pub c45: TreeParams,
    pub logistic: LogisticParams,
    /// Seed for MkNN's random fallback.
    pub seed: u64,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            mknn_k: 3,
            knn_k: 3,
            osdl: OsdlParams::default(),
            mid: TreeParams {
                ambiguity_weight: 1.0,
                ..TreeParams::default()
            },
            c45: TreeParams::default(),
            logistic: LogisticParams::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Mknn(MknnModel),
    Olm(OlmModel),
    Osdl(OsdlModel),
    Mid(DecisionTree),
    #[serde(rename = "c45")]
    OrdinalC45(OrdinalC45),
    Knn(KnnModel),
    Logistic(LogisticModel),
}

impl Model {
    pub fn fit(kind: ClassifierKind, ds: &OrdinalDataset, params: &ClassifierParams) -> Result<Model> {
        Ok(match kind {
            ClassifierKind::Mknn => Model::Mknn(MknnModel::fit(ds, params.mknn_k, params.seed)?),
            ClassifierKind::Olm => Model::Olm(OlmModel::fit(ds)),
            ClassifierKind::Osdl => Model::Osdl(OsdlModel::fit(ds, params.osdl.clone())),
            ClassifierKind::Mid => Model::Mid(DecisionTree::fit(ds, &params.mid)),
            ClassifierKind::OrdinalC45 => Model::OrdinalC45(OrdinalC45::fit(ds, &params.c45)),
            ClassifierKind::Knn => Model::Knn(KnnModel::fit(ds, params.knn_k)),
            ClassifierKind::Logistic => Model::Logistic(LogisticModel::fit(ds, &params.logistic)),
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Model::Mknn(_) => ClassifierKind::Mknn,
            Model::Olm(_) => ClassifierKind::Olm,
            Model::Osdl(_) => ClassifierKind::Osdl,
            Model::Mid(_) => ClassifierKind::Mid,
            Model::OrdinalC45(_) => ClassifierKind::OrdinalC45,
            Model::Knn(_) => ClassifierKind::Knn,
            Model::Logistic(_) => ClassifierKind::Logistic,
        }
    }

    /// Number of features the model was trained on.
    pub fn feature_count(&self) -> usize {
        match self {
            Model::Mknn(m) => m.training.feature_count(),
            Model::Olm(m) => m.rules.feature_count(),
            Model::Osdl(m) => m.training.feature_count(),
            Model::Mid(m) => m.attribute_names.len(),
            Model::OrdinalC45(m) => m.trees[0].attribute_names.len(),
            Model::Knn(m) => m.training.feature_count(),
            Model::Logistic(m) => m.mean.len(),
        }
    }

    /// Predicts every instance of `ds` after checking its width.
    pub fn predict_checked(&self, ds: &OrdinalDataset) -> Result<Vec<usize>> {
        if ds.feature_count() != self.feature_count() {
            return Err(Error::SchemaMismatch {
                expected: self.feature_count(),
                found: ds.feature_count(),
            });
        }
        Ok(self.predict_dataset(ds))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Model> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Classifier for Model {
    fn predict(&self, x: &[f64]) -> usize {
        match self {
            Model::Mknn(m) => m.predict(x),
            Model::Olm(m) => m.predict(x),
            Model::Osdl(m) => m.predict(x),
            Model::Mid(m) => m.predict(x),
            Model::OrdinalC45(m) => m.predict(x),
            Model::Knn(m) => m.predict(x),
            Model::Logistic(m) => m.predict(x),
        }
    }
}
