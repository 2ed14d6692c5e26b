//! Browser bindings for the demo page: a 2-D point cloud that can be
//! corrupted, filtered and relabelled. Everything crosses the boundary as
//! JSON strings.

use monofilter::filters::{run_filter, FilterKind, FilterParams};
use monofilter::metrics::{compute_report, MonotonicitySummary};
use monofilter::noise::inject_noise;
use monofilter::relabel::relabel;
use monofilter::{synth, OrdinalDataset};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cloud {
    /// `[x, y, label]` triples.
    pub points: Vec<(f64, f64, usize)>,
    pub classes: usize,
}

impl Cloud {
    fn from_dataset(ds: &OrdinalDataset) -> Cloud {
        Cloud {
            points: ds
                .instances()
                .iter()
                .map(|i| (i.features[0], i.features[1], i.label))
                .collect(),
            classes: ds.class_count(),
        }
    }

    fn to_dataset(&self) -> Result<OrdinalDataset, String> {
        let rows = self.points.iter().map(|&(x, y, l)| (vec![x, y], l)).collect();
        OrdinalDataset::from_rows(rows, self.classes).map_err(|e| e.to_string())
    }
}

#[derive(Serialize)]
struct Outcome {
    cloud: Cloud,
    /// Indices into the input cloud that were corrupted, removed or relabelled.
    touched: Vec<usize>,
    before: MonotonicitySummary,
    after: MonotonicitySummary,
}

fn parse(json: &str) -> Result<Cloud, String> {
    serde_json::from_str(json).map_err(|e| e.to_string())
}

fn emit<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn generate_json(n: usize, classes: usize, noise: f64, seed: u64) -> Result<String, String> {
    let ds = synth::demo_2d(n, classes, noise, seed).map_err(|e| e.to_string())?;
    emit(&Cloud::from_dataset(&ds))
}

pub fn inject_json(cloud: &str, fraction: f64, seed: u64) -> Result<String, String> {
    let ds = parse(cloud)?.to_dataset()?;
    let (noisy, mask) = inject_noise(&ds, fraction, seed).map_err(|e| e.to_string())?;
    emit(&Outcome {
        cloud: Cloud::from_dataset(&noisy),
        touched: mask.corrupted_indices,
        before: compute_report(&ds).summary(),
        after: compute_report(&noisy).summary(),
    })
}

pub fn filter_json(cloud: &str, method: &str, seed: u64) -> Result<String, String> {
    let ds = parse(cloud)?.to_dataset()?;
    let kind: FilterKind = method.parse().map_err(|e: monofilter::Error| e.to_string())?;
    let params = FilterParams {
        seed,
        ..FilterParams::default()
    };
    let report = run_filter(kind, &ds, &params).map_err(|e| e.to_string())?;
    let kept = if report.kept.is_empty() {
        None
    } else {
        Some(report.apply(&ds).map_err(|e| e.to_string())?)
    };
    emit(&Outcome {
        cloud: kept.as_ref().map_or(
            Cloud {
                points: Vec::new(),
                classes: ds.class_count(),
            },
            Cloud::from_dataset,
        ),
        touched: report.removed,
        before: compute_report(&ds).summary(),
        after: kept.map(|k| compute_report(&k).summary()).unwrap_or_default(),
    })
}

pub fn relabel_json(cloud: &str) -> Result<String, String> {
    let ds = parse(cloud)?.to_dataset()?;
    let result = relabel(&ds).map_err(|e| e.to_string())?;
    emit(&Outcome {
        cloud: Cloud::from_dataset(&result.dataset),
        touched: result.changed_indices,
        before: compute_report(&ds).summary(),
        after: compute_report(&result.dataset).summary(),
    })
}

#[wasm_bindgen]
pub fn generate(n: usize, classes: usize, noise: f64, seed: u32) -> Result<String, JsError> {
    generate_json(n, classes, noise, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn inject(cloud: &str, fraction: f64, seed: u32) -> Result<String, JsError> {
    inject_json(cloud, fraction, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn filter(cloud: &str, method: &str, seed: u32) -> Result<String, JsError> {
    filter_json(cloud, method, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = relabel)]
pub fn relabel_points(cloud: &str) -> Result<String, JsError> {
    relabel_json(cloud).map_err(|e| JsError::new(&e))
}
