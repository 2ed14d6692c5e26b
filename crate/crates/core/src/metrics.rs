//! Non-monotonicity indices over a labelled dataset.

use serde::{Deserialize, Serialize};

use crate::dataset::{compare_features, Dominance, OrdinalDataset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Clash pairs over ordered pairs, `Σ NClash(x) / (n(n-1))`.
    pub nmi1: f64,
    /// Fraction of instances clashing with at least one other instance.
    pub nmi2: f64,
    pub non_comparable_pairs: u64,
    pub clash_counts: Vec<usize>,
    pub size: usize,
}

/// The scalar part of a report, as written to CSV.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonotonicitySummary {
    pub nmi1: f64,
    pub nmi2: f64,
    pub noncomparable: u64,
    pub size: usize,
}

impl MonotonicityReport {
    pub fn summary(&self) -> MonotonicitySummary {
        MonotonicitySummary {
            nmi1: self.nmi1,
            nmi2: self.nmi2,
            noncomparable: self.non_comparable_pairs,
            size: self.size,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.clash_counts.iter().all(|&c| c == 0)
    }

    pub fn clash_pairs(&self) -> usize {
        self.clash_counts.iter().sum::<usize>() / 2
    }

    /// Header plus one row: `nmi1,nmi2,noncomparable,size`.
    pub fn to_csv(&self) -> String {
        format!(
            "nmi1,nmi2,noncomparable,size\n{},{},{},{}\n",
            self.nmi1, self.nmi2, self.non_comparable_pairs, self.size
        )
    }
}

/// Number of instances clashing with instance `i` (never itself).
pub fn nclash(ds: &OrdinalDataset, i: usize) -> usize {
    let xi = ds.features(i);
    let yi = ds.label(i);
    (0..ds.len())
        .filter(|&j| j != i && crate::dataset::is_clash(xi, yi, ds.features(j), ds.label(j)))
        .count()
}

/// Share of NMI1 attributable to instance `i`: `nclash(i) / (n - 1)`.
pub fn nmi1_contribution(clash_count: usize, n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        clash_count as f64 / (n - 1) as f64
    }
}

pub fn compute_report(ds: &OrdinalDataset) -> MonotonicityReport {
    let n = ds.len();
    let mut clash_counts = vec![0usize; n];
    let mut non_comparable = 0u64;
    for i in 0..n {
        let (xi, yi) = (ds.features(i), ds.label(i));
        for j in (i + 1)..n {
            let (xj, yj) = (ds.features(j), ds.label(j));
            let clash = match compare_features(xi, xj) {
                Dominance::Equal => yi != yj,
                Dominance::DominatedBy => yi > yj,
                Dominance::Dominates => yi < yj,
                Dominance::Incomparable => {
                    non_comparable += 1;
                    false
                }
            };
            if clash {
                clash_counts[i] += 1;
                clash_counts[j] += 1;
            }
        }
    }
    let total: usize = clash_counts.iter().sum();
    let nmi1 = if n < 2 {
        0.0
    } else {
        total as f64 / (n as f64 * (n as f64 - 1.0))
    };
    let nmi2 = clash_counts.iter().filter(|&&c| c > 0).count() as f64 / n as f64;
    MonotonicityReport {
        nmi1,
        nmi2,
        non_comparable_pairs: non_comparable,
        clash_counts,
        size: n,
    }
}
