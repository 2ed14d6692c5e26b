use serde::{Deserialize, Serialize};

use super::Classifier;
use crate::dataset::{weakly_below, OrdinalDataset};

/// OSDL settings. Only `interpolation` affects predictions; the remaining
/// fields record the configured variant (mean classification, unbalanced,
/// unweighted, no tuning) and are accepted for completeness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OsdlParams {
    pub classification_type: String,
    pub balanced: bool,
    pub weighted: bool,
    pub tune_interpolation: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub interpolation: f64,
    pub interpolation_step_size: u32,
}

impl Default for OsdlParams {
    fn default() -> Self {
        OsdlParams {
            classification_type: "media".into(),
            balanced: false,
            weighted: false,
            tune_interpolation: false,
            lower_bound: 0.0,
            upper_bound: 1.0,
            interpolation: 0.5,
            interpolation_step_size: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OsdlModel {
    pub params: OsdlParams,
    pub median_label: usize,
    pub training: OrdinalDataset,
}

/// Rounds to the nearest integer, halves downwards.
fn round_half_down(v: f64) -> f64 {
    (v - 0.5).ceil()
}

impl OsdlModel {
    pub fn fit(ds: &OrdinalDataset, params: OsdlParams) -> Self {
        let mut labels = ds.labels();
        labels.sort_unstable();
        let median_label = labels[(labels.len() - 1) / 2];
        OsdlModel {
            params,
            median_label,
            training: ds.clone(),
        }
    }

    /// `(max label below x, min label above x)`.
    pub fn bounds(&self, x: &[f64]) -> (Option<usize>, Option<usize>) {
        let mut lower: Option<usize> = None;
        let mut upper: Option<usize> = None;
        for inst in self.training.instances() {
            if weakly_below(&inst.features, x) {
                lower = Some(lower.map_or(inst.label, |l| l.max(inst.label)));
            }
            if weakly_below(x, &inst.features) {
                upper = Some(upper.map_or(inst.label, |u| u.min(inst.label)));
            }
        }
        (lower, upper)
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let value = match self.bounds(x) {
            (Some(l), Some(u)) => {
                let (l, u) = (l as f64, u as f64);
                l + self.params.interpolation * (u - l)
            }
            (Some(l), None) => l as f64,
            (None, Some(u)) => u as f64,
            (None, None) => self.median_label as f64,
        };
        let top = (self.training.class_count() - 1) as f64;
        round_half_down(value).clamp(0.0, top) as usize
    }
}

impl Classifier for OsdlModel {
    fn predict(&self, x: &[f64]) -> usize {
        OsdlModel::predict(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[(&[f64], usize)], c: usize) -> OrdinalDataset {
        OrdinalDataset::from_rows(rows.iter().map(|(x, y)| (x.to_vec(), *y)).collect(), c).unwrap()
    }

    #[test]
    fn interpolates_half_down() {
        let d = ds(&[(&[1.], 0), (&[2.], 1), (&[3.], 2)], 3);
        let m = OsdlModel::fit(&d, OsdlParams::default());
        assert_eq!(m.bounds(&[2.5]), (Some(1), Some(2)));
        assert_eq!(m.predict(&[2.5]), 1);
        assert_eq!(m.predict(&[2.0]), 1);
        assert_eq!(m.predict(&[0.0]), 0);
        assert_eq!(m.predict(&[9.0]), 2);
    }

    #[test]
    fn vacuous_bounds_use_median() {
        let d = ds(&[(&[1., 9.], 0), (&[9., 1.], 2), (&[5., 5.], 1)], 3);
        let m = OsdlModel::fit(&d, OsdlParams::default());
        assert_eq!(m.bounds(&[0., 10.]), (None, None));
        assert_eq!(m.predict(&[0., 10.]), 1);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_down(1.5), 1.0);
        assert_eq!(round_half_down(1.6), 2.0);
        assert_eq!(round_half_down(1.4), 1.0);
        assert_eq!(round_half_down(0.5), 0.0);
    }
}
