//! Seeded synthetic ordinal datasets.
//!
//! The four benchmark generators mimic the shape of the classic small ordinal
//! benchmarks (employee selection, lecturer evaluation, ...): integer
//! features on short scales and a class obtained by cutting a noisy weighted
//! sum of the features into equal-frequency bins. The noise makes the data
//! mildly non-monotone, the way real survey data is.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, AttributeMeta, Instance, OrdinalDataset};
use crate::discretize::{bin_of, equal_frequency_cuts};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub name: String,
    pub size: usize,
    /// Feature `j` takes integer values `1..=levels[j]`.
    pub levels: Vec<u32>,
    /// Weight of each feature in the latent score; 0 marks an irrelevant feature.
    pub weights: Vec<f64>,
    /// Noise standard deviation relative to the latent score's spread.
    pub noise: f64,
    pub classes: usize,
    pub seed: u64,
}

pub const BENCHMARKS: [&str; 4] = ["era", "esl", "lev", "swd"];

pub fn benchmark_spec(name: &str) -> Result<SynthSpec> {
    let spec = |name: &str, size, levels: Vec<u32>, weights: Vec<f64>, noise, classes, seed| SynthSpec {
        name: name.to_string(),
        size,
        levels,
        weights,
        noise,
        classes,
        seed,
    };
    Ok(match name.to_ascii_lowercase().as_str() {
        "era" => spec("era", 1000, vec![15; 4], vec![1.0, 0.8, 0.6, 0.5], 1.0, 9, 101),
        "esl" => spec("esl", 488, vec![9; 4], vec![1.0, 1.0, 0.9, 0.7], 0.25, 9, 102),
        "lev" => spec("lev", 1000, vec![5; 4], vec![1.0, 0.8, 0.7, 0.4], 0.4, 5, 103),
        "swd" => spec(
            "swd",
            1000,
            vec![5; 10],
            vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.0, 0.0, 0.0],
            0.5,
            4,
            104,
        ),
        other => return Err(Error::InvalidParameter(format!("unknown benchmark {other:?}"))),
    })
}

pub fn benchmark(name: &str) -> Result<OrdinalDataset> {
    generate(&benchmark_spec(name)?)
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

pub fn generate(spec: &SynthSpec) -> Result<OrdinalDataset> {
    if spec.levels.len() != spec.weights.len() || spec.levels.is_empty() {
        return Err(Error::InvalidParameter("levels and weights must be non-empty and equally long".into()));
    }
    if spec.size < spec.classes {
        return Err(Error::InvalidParameter("fewer instances than classes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows: Vec<Vec<f64>> = (0..spec.size)
        .map(|_| spec.levels.iter().map(|&l| rng.gen_range(1..=l) as f64).collect())
        .collect();
    let clean: Vec<f64> = rows
        .iter()
        .map(|x| x.iter().zip(&spec.weights).map(|(v, w)| v * w).sum())
        .collect();
    let spread = std_dev(&clean).max(1e-9);
    let normal = Normal::new(0.0, spec.noise * spread).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let latent: Vec<f64> = clean.iter().map(|c| c + normal.sample(&mut rng)).collect();
    let cuts = equal_frequency_cuts(&latent, spec.classes)?;
    let attributes = spec
        .levels
        .iter()
        .enumerate()
        .map(|(j, _)| AttributeMeta {
            name: format!("in{}", j + 1),
            kind: AttributeKind::Integer,
            observed_min: 0.0,
            observed_max: 0.0,
        })
        .collect();
    let instances = rows
        .into_iter()
        .zip(&latent)
        .map(|(x, &t)| Instance::new(x, bin_of(t, &cuts)))
        .collect();
    let class_names = (1..=spec.classes).map(|c| c.to_string()).collect();
    OrdinalDataset::new(spec.name.clone(), attributes, instances, class_names)
}

/// Points in the unit square labelled by bands of `x + y`, with `noise`
/// jitter on the score. Used by the browser demo.
pub fn demo_2d(n: usize, classes: usize, noise: f64, seed: u64) -> Result<OrdinalDataset> {
    if classes < 2 || n < classes {
        return Err(Error::InvalidParameter("need n >= classes >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise.max(0.0)).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let instances = (0..n)
        .map(|_| {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            let score = (x + y) / 2.0 + normal.sample(&mut rng);
            let label = ((score * classes as f64).floor().max(0.0) as usize).min(classes - 1);
            Instance::new(vec![x, y], label)
        })
        .collect();
    OrdinalDataset::new(
        "demo",
        vec![AttributeMeta::real("x"), AttributeMeta::real("y")],
        instances,
        (0..classes).map(|c| c.to_string()).collect(),
    )
}
