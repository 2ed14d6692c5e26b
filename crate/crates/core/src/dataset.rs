//! Ordinal dataset model and the dominance partial order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value domain of an input attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttributeKind {
    Real,
    Integer,
    /// Categorical values with an explicit order; stored features are the
    /// position of the value in `values`.
    OrdinalCategorical { values: Vec<String> },
}

impl AttributeKind {
    pub fn tag(&self) -> &'static str {
        match self {
            AttributeKind::Real => "real",
            AttributeKind::Integer => "integer",
            AttributeKind::OrdinalCategorical { .. } => "ordinal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeMeta {
    pub name: String,
    pub kind: AttributeKind,
    pub observed_min: f64,
    pub observed_max: f64,
}

impl AttributeMeta {
    pub fn real(name: impl Into<String>) -> Self {
        AttributeMeta {
            name: name.into(),
            kind: AttributeKind::Real,
            observed_min: 0.0,
            observed_max: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub features: Vec<f64>,
    pub label: usize,
}

impl Instance {
    pub fn new(features: Vec<f64>, label: usize) -> Self {
        Instance { features, label }
    }
}

/// Outcome of comparing `x` against `x'` under the componentwise order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dominance {
    /// Feature vectors identical.
    Equal,
    /// `x ⪯ x'` and the vectors differ.
    DominatedBy,
    /// `x' ⪯ x` and the vectors differ.
    Dominates,
    Incomparable,
}

impl Dominance {
    pub fn is_comparable(self) -> bool {
        self != Dominance::Incomparable
    }

    pub fn reverse(self) -> Self {
        match self {
            Dominance::DominatedBy => Dominance::Dominates,
            Dominance::Dominates => Dominance::DominatedBy,
            other => other,
        }
    }
}

/// Compares two feature vectors of equal length. Exact `<=` on stored values.
#[inline]
pub fn compare_features(a: &[f64], b: &[f64]) -> Dominance {
    debug_assert_eq!(a.len(), b.len());
    let mut a_le_b = true;
    let mut b_le_a = true;
    for (&u, &v) in a.iter().zip(b) {
        if u < v {
            b_le_a = false;
        } else if u > v {
            a_le_b = false;
        }
        if !a_le_b && !b_le_a {
            return Dominance::Incomparable;
        }
    }
    match (a_le_b, b_le_a) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::DominatedBy,
        (false, true) => Dominance::Dominates,
        (false, false) => Dominance::Incomparable,
    }
}

/// `a ⪯ b` componentwise, equality included.
#[inline]
pub fn weakly_below(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| u <= v)
}

/// True when the labelled pair violates the monotonicity constraint.
#[inline]
pub fn is_clash(a: &[f64], a_label: usize, b: &[f64], b_label: usize) -> bool {
    match compare_features(a, b) {
        Dominance::Equal => a_label != b_label,
        Dominance::DominatedBy => a_label > b_label,
        Dominance::Dominates => a_label < b_label,
        Dominance::Incomparable => false,
    }
}

fn check_schema(x: &Instance, y: &Instance) -> Result<()> {
    if x.features.len() != y.features.len() {
        return Err(Error::SchemaMismatch {
            expected: x.features.len(),
            found: y.features.len(),
        });
    }
    Ok(())
}

pub fn dominance(x: &Instance, y: &Instance) -> Result<Dominance> {
    check_schema(x, y)?;
    Ok(compare_features(&x.features, &y.features))
}

/// Whether a pair is a monotone comparable pair. Incomparable pairs yield
/// `false`; callers that need to tell them apart use [`dominance`].
pub fn is_monotone_pair(x: &Instance, y: &Instance) -> Result<bool> {
    check_schema(x, y)?;
    Ok(match compare_features(&x.features, &y.features) {
        Dominance::Equal => x.label == y.label,
        Dominance::DominatedBy => x.label <= y.label,
        Dominance::Dominates => x.label >= y.label,
        Dominance::Incomparable => false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrdinalDataset {
    pub name: String,
    attributes: Vec<AttributeMeta>,
    instances: Vec<Instance>,
    class_names: Vec<String>,
}

impl OrdinalDataset {
    /// Validates the invariants and recomputes observed attribute ranges.
    pub fn new(
        name: impl Into<String>,
        mut attributes: Vec<AttributeMeta>,
        instances: Vec<Instance>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::NoInstances);
        }
        if attributes.is_empty() {
            return Err(Error::InvalidDataset("no input attributes".into()));
        }
        if class_names.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "at least 2 classes required, got {}",
                class_names.len()
            )));
        }
        let f = attributes.len();
        let c = class_names.len();
        for (row, inst) in instances.iter().enumerate() {
            if inst.features.len() != f {
                return Err(Error::SchemaMismatch {
                    expected: f,
                    found: inst.features.len(),
                });
            }
            if inst.label >= c {
                return Err(Error::parse(row, format!("label {} out of range", inst.label)));
            }
            if inst.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(row, "non-finite feature value"));
            }
        }
        for (j, attr) in attributes.iter_mut().enumerate() {
            if let AttributeKind::OrdinalCategorical { values } = &attr.kind {
                if values.len() < 2 {
                    return Err(Error::InvalidDataset(format!(
                        "ordinal attribute {} needs at least 2 values",
                        attr.name
                    )));
                }
            }
            let (lo, hi) = instances.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x.features[j]), hi.max(x.features[j]))
            });
            attr.observed_min = lo;
            attr.observed_max = hi;
        }
        Ok(OrdinalDataset {
            name: name.into(),
            attributes,
            instances,
            class_names,
        })
    }

    /// Builds a dataset with anonymous real attributes and classes `0..c`.
    pub fn from_rows(rows: Vec<(Vec<f64>, usize)>, class_count: usize) -> Result<Self> {
        let f = rows.first().map(|r| r.0.len()).unwrap_or(0);
        let attributes = (0..f).map(|j| AttributeMeta::real(format!("a{}", j + 1))).collect();
        let instances = rows.into_iter().map(|(x, y)| Instance::new(x, y)).collect();
        let classes = (0..class_count).map(|k| k.to_string()).collect();
        OrdinalDataset::new("anonymous", attributes, instances, classes)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn attributes(&self) -> &[AttributeMeta] {
        &self.attributes
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn instance(&self, i: usize) -> &Instance {
        &self.instances[i]
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.instances[i].features
    }

    pub fn label(&self, i: usize) -> usize {
        self.instances[i].label
    }

    pub fn labels(&self) -> Vec<usize> {
        self.instances.iter().map(|x| x.label).collect()
    }

    /// Restriction to `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let instances = indices.iter().map(|&i| self.instances[i].clone()).collect();
        OrdinalDataset::new(
            self.name.clone(),
            self.attributes.clone(),
            instances,
            self.class_names.clone(),
        )
    }

    /// Same features, new labels.
    pub fn with_labels(&self, labels: &[usize]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} labels, got {}",
                self.len(),
                labels.len()
            )));
        }
        let instances = self
            .instances
            .iter()
            .zip(labels)
            .map(|(x, &y)| Instance::new(x.features.clone(), y))
            .collect();
        OrdinalDataset::new(
            self.name.clone(),
            self.attributes.clone(),
            instances,
            self.class_names.clone(),
        )
    }

    /// Checks that `x` matches this dataset's schema.
    pub fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_count() {
            return Err(Error::SchemaMismatch {
                expected: self.feature_count(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn class_distribution(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for x in &self.instances {
            counts[x.label] += 1;
        }
        counts
    }
}

/// Squared Euclidean distance.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}
