use std::collections::BTreeMap;

use super::{FilterReport, IterationRecord};
use crate::classifiers::{label_interval_excluding, nearest_indices, vote, LabelInterval, VoteTieBreak};
use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::par;

/// Monotone label interval of instance `i` against the rest of `ds`. Left
/// out, `i` itself would collapse the interval onto its own label. When the
/// bounds cross (the neighbourhood already clashes) the range between them
/// is used.
pub(crate) fn neighbour_interval(ds: &OrdinalDataset, i: usize) -> LabelInterval {
    let iv = label_interval_excluding(ds.features(i), ds, i);
    LabelInterval {
        y_min: iv.y_min.min(iv.y_max),
        y_max: iv.y_min.max(iv.y_max),
    }
}

/// Label that the `k` monotone nearest neighbours of instance `i` agree on,
/// or `None` when no other instance fits its label interval.
pub(crate) fn monotone_neighbour_vote(ds: &OrdinalDataset, i: usize, k: usize) -> Option<usize> {
    let x = ds.features(i);
    let iv = neighbour_interval(ds, i);
    let near = nearest_indices(ds, x, k, |j| j != i && iv.contains(ds.label(j)));
    vote(near.iter().map(|&j| ds.label(j)), ds.class_count(), VoteTieBreak::Midpoint(iv))
}

/// Monotonic edited nearest neighbour: single pass, every decision made
/// against the full input.
pub fn menn(ds: &OrdinalDataset, k: usize) -> Result<FilterReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("menn needs k >= 1".into()));
    }
    let removed = par::map_range(ds.len(), |i| {
        monotone_neighbour_vote(ds, i, k).is_some_and(|y| y != ds.label(i))
    });
    let count = removed.iter().filter(|&&r| r).count();
    let params = BTreeMap::from([("k".to_string(), k.to_string())]);
    Ok(FilterReport::from_removed_mask(
        "menn",
        &removed,
        vec![IterationRecord { removed: count, good: 0 }],
        params,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(labels: &[usize], c: usize) -> OrdinalDataset {
        OrdinalDataset::from_rows(
            labels.iter().enumerate().map(|(i, &y)| (vec![i as f64 + 1.0], y)).collect(),
            c,
        )
        .unwrap()
    }

    #[test]
    fn uniform_labels_untouched() {
        let r = menn(&line(&[1; 8], 3), 3).unwrap();
        assert!(r.removed.is_empty());
        assert_eq!(r.kept.len(), 8);
    }

    #[test]
    fn lone_one_removed() {
        // x=3 (label 1): interval without itself is [0, 0], neighbours all 0.
        // x=4: bounds cross (a 1 below, a 0 above), range [0, 1]; nearest
        // three are 1, 0, 0 so it stays.
        // x=5: interval [1, 1], only neighbour is the 1, removed.
        let r = menn(&line(&[0, 0, 1, 0, 0], 2), 3).unwrap();
        assert_eq!(r.removed, vec![2, 4]);
    }

    #[test]
    fn tiny_dataset_truncates() {
        let r = menn(&line(&[0, 1], 2), 3).unwrap();
        // each sees only the other, inside its interval
        assert_eq!(r.removed, vec![0, 1]);
        let r = menn(&line(&[1, 1], 2), 5).unwrap();
        assert!(r.removed.is_empty());
    }

    #[test]
    fn zero_k_rejected() {
        assert!(menn(&line(&[0, 1], 2), 0).is_err());
    }
}
