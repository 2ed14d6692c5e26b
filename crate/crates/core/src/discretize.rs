//! Target discretization and the per-feature monotone association score.

use crate::dataset::{AttributeMeta, Instance, OrdinalDataset};
use crate::error::{Error, Result};

/// Cut values for equal-frequency binning. Values equal to a cut fall into
/// the lower bin; a cut that would repeat the previous one advances to the
/// next larger value.
pub fn equal_frequency_cuts(targets: &[f64], bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(Error::InvalidParameter("bins must be at least 2".into()));
    }
    let mut sorted = targets.to_vec();
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite target value".into()));
    }
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < bins {
        return Err(Error::InvalidParameter(format!(
            "{} distinct target values cannot fill {bins} bins",
            distinct.len()
        )));
    }
    let n = sorted.len();
    let mut cuts: Vec<f64> = Vec::with_capacity(bins - 1);
    for i in 1..bins {
        let mut pos = (i * n).div_ceil(bins) - 1;
        if let Some(&prev) = cuts.last() {
            while pos < n && sorted[pos] <= prev {
                pos += 1;
            }
        }
        // the top bin must stay non-empty
        if pos >= n || sorted[pos] >= sorted[n - 1] {
            return Err(Error::InvalidParameter(format!(
                "target ties leave fewer than {bins} non-empty bins"
            )));
        }
        cuts.push(sorted[pos]);
    }
    Ok(cuts)
}

pub fn bin_of(value: f64, cuts: &[f64]) -> usize {
    cuts.iter().filter(|&&c| value > c).count()
}

pub fn discretize_target(
    name: &str,
    attributes: Vec<AttributeMeta>,
    rows: Vec<Vec<f64>>,
    targets: &[f64],
    bins: usize,
) -> Result<OrdinalDataset> {
    if rows.len() != targets.len() {
        return Err(Error::InvalidParameter("rows and targets differ in length".into()));
    }
    if rows.is_empty() {
        return Err(Error::NoInstances);
    }
    let cuts = equal_frequency_cuts(targets, bins)?;
    let instances = rows
        .into_iter()
        .zip(targets)
        .map(|(x, &t)| Instance::new(x, bin_of(t, &cuts)))
        .collect();
    let class_names = (0..bins).map(|b| format!("bin{b}")).collect();
    OrdinalDataset::new(name, attributes, instances, class_names)
}

/// Average (fractional) ranks, 1-based; ties share the mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation; 0 when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        (cov / (va * vb).sqrt()).clamp(-1.0, 1.0)
    }
}

/// Monotone association score of every feature with the class label.
pub fn feature_scores(ds: &OrdinalDataset) -> Vec<f64> {
    let labels: Vec<f64> = ds.labels().into_iter().map(|y| y as f64).collect();
    (0..ds.feature_count())
        .map(|j| {
            let column: Vec<f64> = ds.instances().iter().map(|x| x.features[j]).collect();
            spearman(&column, &labels)
        })
        .collect()
}

/// Number of features whose score lies outside `[-threshold, threshold]`.
pub fn monotone_feature_count(ds: &OrdinalDataset, threshold: f64) -> usize {
    feature_scores(ds)
        .into_iter()
        .filter(|s| s.abs() > threshold)
        .count()
}
