//! Friedman test with Holm step-down comparisons against the best-ranked
//! algorithm.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::discretize::average_ranks;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolmComparison {
    pub algorithm: String,
    pub z: f64,
    pub p_value: f64,
    pub p_holm: f64,
    pub significant_05: bool,
    pub significant_10: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub algorithms: Vec<String>,
    pub mean_ranks: Vec<f64>,
    pub blocks: usize,
    pub statistic: f64,
    pub p_value: f64,
    /// Index of the best (lowest) mean rank.
    pub control: usize,
    /// One entry per non-control algorithm, in input order.
    pub comparisons: Vec<HolmComparison>,
}

/// Ranks within one block; rank 1 is the best score, ties averaged.
pub fn block_ranks(scores: &[f64], direction: Direction) -> Vec<f64> {
    let keyed: Vec<f64> = match direction {
        Direction::HigherBetter => scores.iter().map(|s| -s).collect(),
        Direction::LowerBetter => scores.to_vec(),
    };
    average_ranks(&keyed)
}

pub fn friedman_holm(matrix: &[Vec<f64>], algorithms: &[String], direction: Direction) -> Result<RankTable> {
    let n = matrix.len();
    let k = algorithms.len();
    if k < 2 || n < 2 {
        return Err(Error::InvalidParameter("need at least 2 algorithms and 2 blocks".into()));
    }
    if matrix.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidParameter(format!("every block needs {k} scores")));
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite score".into()));
    }
    let (nf, kf) = (n as f64, k as f64);
    let mut rank_sums = vec![0.0; k];
    let mut tie_term = 0.0;
    for row in matrix {
        let ranks = block_ranks(row, direction);
        for (s, r) in rank_sums.iter_mut().zip(&ranks) {
            *s += r;
        }
        let mut sorted = row.clone();
        sorted.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < k {
            let mut j = i;
            while j + 1 < k && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / nf).collect();
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * rank_sums.iter().map(|s| s * s).sum::<f64>() - 3.0 * nf * (kf + 1.0);
    let correction = 1.0 - tie_term / (nf * (kf * kf * kf - kf));
    let (statistic, p_value) = if correction <= 0.0 {
        (0.0, 1.0)
    } else {
        let stat = raw / correction;
        let chi = ChiSquared::new(kf - 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        (stat, chi.sf(stat))
    };

    let mut control = 0;
    for (a, &r) in mean_ranks.iter().enumerate() {
        if r < mean_ranks[control] {
            control = a;
        }
    }
    let se = (kf * (kf + 1.0) / (6.0 * nf)).sqrt();
    let normal = Normal::standard();
    let mut comparisons: Vec<HolmComparison> = (0..k)
        .filter(|&a| a != control)
        .map(|a| {
            let z = (mean_ranks[a] - mean_ranks[control]) / se;
            HolmComparison {
                algorithm: algorithms[a].clone(),
                z,
                p_value: 2.0 * normal.sf(z.abs()),
                p_holm: 0.0,
                significant_05: false,
                significant_10: false,
            }
        })
        .collect();
    let m = comparisons.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| comparisons[a].p_value.total_cmp(&comparisons[b].p_value).then(a.cmp(&b)));
    let mut running = 0.0f64;
    for (step, &c) in order.iter().enumerate() {
        running = running.max(((m - step) as f64 * comparisons[c].p_value).min(1.0));
        comparisons[c].p_holm = running;
        comparisons[c].significant_05 = running < 0.05;
        comparisons[c].significant_10 = running < 0.10;
    }
    Ok(RankTable {
        algorithms: algorithms.to_vec(),
        mean_ranks,
        blocks: n,
        statistic,
        p_value,
        control,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("alg{i}")).collect()
    }

    #[test]
    fn total_dominance() {
        let m = vec![vec![0.9, 0.1], vec![0.8, 0.7], vec![0.6, 0.5]];
        let t = friedman_holm(&m, &names(2), Direction::HigherBetter).unwrap();
        assert_eq!(t.mean_ranks, vec![1.0, 2.0]);
        assert_eq!(t.control, 0);
        let t = friedman_holm(&m, &names(2), Direction::LowerBetter).unwrap();
        assert_eq!(t.mean_ranks, vec![2.0, 1.0]);
    }

    #[test]
    fn full_ties() {
        let m = vec![vec![0.5; 4]; 3];
        let t = friedman_holm(&m, &names(4), Direction::HigherBetter).unwrap();
        assert!(t.mean_ranks.iter().all(|&r| r == 2.5));
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 1.0);
    }

    #[test]
    fn shape_errors() {
        assert!(friedman_holm(&[vec![1.0, 2.0]], &names(2), Direction::HigherBetter).is_err());
        assert!(friedman_holm(&[vec![1.0], vec![2.0]], &names(2), Direction::HigherBetter).is_err());
    }
}
