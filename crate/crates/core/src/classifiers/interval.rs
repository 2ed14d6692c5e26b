use serde::{Deserialize, Serialize};

use crate::dataset::{squared_distance, weakly_below, OrdinalDataset};

/// Labels a monotone prediction for some point may take. `y_min > y_max`
/// encodes an empty interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelInterval {
    pub y_min: usize,
    pub y_max: usize,
}

impl LabelInterval {
    pub fn is_empty(&self) -> bool {
        self.y_min > self.y_max
    }

    pub fn contains(&self, y: usize) -> bool {
        self.y_min <= y && y <= self.y_max
    }
}

/// `y_min` is the largest label among instances below `x`, `y_max` the
/// smallest label among instances above it; equal instances count for both.
pub fn label_interval(x: &[f64], ds: &OrdinalDataset) -> LabelInterval {
    interval_impl(x, ds, None)
}

/// As [`label_interval`], ignoring training instance `skip`.
pub fn label_interval_excluding(x: &[f64], ds: &OrdinalDataset, skip: usize) -> LabelInterval {
    interval_impl(x, ds, Some(skip))
}

fn interval_impl(x: &[f64], ds: &OrdinalDataset, skip: Option<usize>) -> LabelInterval {
    let mut y_min = 0;
    let mut y_max = ds.class_count() - 1;
    for (i, inst) in ds.instances().iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if weakly_below(&inst.features, x) {
            y_min = y_min.max(inst.label);
        }
        if weakly_below(x, &inst.features) {
            y_max = y_max.min(inst.label);
        }
    }
    LabelInterval { y_min, y_max }
}

/// Indices of the `k` training instances closest to `x` among those passing
/// `accept`. Distance ties go to the lower index.
pub fn nearest_indices(ds: &OrdinalDataset, x: &[f64], k: usize, accept: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut candidates: Vec<(f64, usize)> = ds
        .instances()
        .iter()
        .enumerate()
        .filter(|(i, _)| accept(*i))
        .map(|(i, inst)| (squared_distance(x, &inst.features), i))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if candidates.len() > k && k > 0 {
        candidates.select_nth_unstable_by(k - 1, cmp);
        candidates.truncate(k);
    }
    candidates.sort_by(cmp);
    candidates.truncate(k);
    candidates.into_iter().map(|(_, i)| i).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoteTieBreak {
    /// The lowest tied label.
    Lower,
    /// The tied label closest to the midpoint of an interval, then the lower.
    Midpoint(LabelInterval),
}

/// Most frequent label; `None` when there are no votes.
pub fn vote(labels: impl IntoIterator<Item = usize>, class_count: usize, tie: VoteTieBreak) -> Option<usize> {
    let mut counts = vec![0usize; class_count];
    let mut any = false;
    for y in labels {
        counts[y] += 1;
        any = true;
    }
    if !any {
        return None;
    }
    let best = *counts.iter().max().expect("class_count >= 1");
    let tied = (0..class_count).filter(|&y| counts[y] == best);
    Some(match tie {
        VoteTieBreak::Lower => tied.min().expect("at least one label"),
        VoteTieBreak::Midpoint(iv) => {
            // compare |2y - (y_min + y_max)| to stay in integers
            let twice_mid = (iv.y_min + iv.y_max) as i64;
            tied.min_by_key(|&y| ((2 * y as i64 - twice_mid).abs(), y))
                .expect("at least one label")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[(&[f64], usize)], c: usize) -> OrdinalDataset {
        OrdinalDataset::from_rows(rows.iter().map(|(x, y)| (x.to_vec(), *y)).collect(), c).unwrap()
    }

    #[test]
    fn interval_between_neighbours() {
        let d = ds(&[(&[1.], 0), (&[2.], 1), (&[3.], 2)], 3);
        assert_eq!(label_interval(&[2.5], &d), LabelInterval { y_min: 1, y_max: 2 });
    }

    #[test]
    fn vacuous_interval() {
        let d = ds(&[(&[1., 5.], 1), (&[5., 1.], 2)], 4);
        assert_eq!(label_interval(&[3., 3.], &d), LabelInterval { y_min: 0, y_max: 3 });
    }

    #[test]
    fn empty_interval_on_clash() {
        let d = ds(&[(&[1.], 2), (&[3.], 0)], 3);
        let iv = label_interval(&[2.], &d);
        assert_eq!((iv.y_min, iv.y_max), (2, 0));
        assert!(iv.is_empty());
    }

    #[test]
    fn equal_instance_counts_both_sides() {
        let d = ds(&[(&[2.], 1)], 3);
        assert_eq!(label_interval(&[2.], &d), LabelInterval { y_min: 1, y_max: 1 });
        assert_eq!(label_interval_excluding(&[2.], &d, 0), LabelInterval { y_min: 0, y_max: 2 });
    }

    #[test]
    fn nearest_ties_lower_index() {
        let d = ds(&[(&[0.], 0), (&[2.], 1), (&[4.], 0)], 2);
        assert_eq!(nearest_indices(&d, &[3.], 1, |_| true), vec![1]);
        assert_eq!(nearest_indices(&d, &[3.], 2, |_| true), vec![1, 2]);
        assert_eq!(nearest_indices(&d, &[1.], 1, |_| true), vec![0]);
        assert_eq!(nearest_indices(&d, &[1.], 5, |i| i != 0), vec![1, 2]);
    }

    #[test]
    fn vote_ties() {
        assert_eq!(vote([2, 0], 3, VoteTieBreak::Lower), Some(0));
        let iv = LabelInterval { y_min: 1, y_max: 3 };
        assert_eq!(vote([1, 3, 2], 4, VoteTieBreak::Midpoint(iv)), Some(2));
        assert_eq!(vote([1, 3], 4, VoteTieBreak::Midpoint(iv)), Some(1));
        assert_eq!(vote(Vec::<usize>::new(), 3, VoteTieBreak::Lower), None);
    }
}
