use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterReport;
use crate::noise::NoiseMask;

fn check_lengths(preds: &[usize], truths: &[usize]) -> Result<()> {
    if preds.len() != truths.len() {
        return Err(Error::InvalidParameter(format!(
            "{} predictions for {} targets",
            preds.len(),
            truths.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::InvalidParameter("no predictions".into()));
    }
    Ok(())
}

/// Share of exact matches.
pub fn accuracy(preds: &[usize], truths: &[usize]) -> Result<f64> {
    check_lengths(preds, truths)?;
    let hits = preds.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Mean absolute distance between class indices.
pub fn mae(preds: &[usize], truths: &[usize]) -> Result<f64> {
    check_lengths(preds, truths)?;
    let total: usize = preds.iter().zip(truths).map(|(p, t)| p.abs_diff(*t)).sum();
    Ok(total as f64 / preds.len() as f64)
}

/// Fold index of every instance. Stratified (each class dealt round-robin
/// after shuffling) unless some class has fewer members than `k`, in which
/// case a plain shuffled split is used. The flag reports which one ran.
pub fn fold_assignment(labels: &[usize], k: usize, seed: u64) -> Result<(Vec<usize>, bool)> {
    let n = labels.len();
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!("cannot split {n} instances into {k} folds")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut by_class = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }
    let stratified = by_class.iter().all(|members| members.is_empty() || members.len() >= k);
    let mut fold = vec![0; n];
    if stratified {
        let mut next = 0;
        for members in &mut by_class {
            members.shuffle(&mut rng);
            for &i in members.iter() {
                fold[i] = next % k;
                next += 1;
            }
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for (p, i) in order.into_iter().enumerate() {
            fold[i] = p % k;
        }
    }
    Ok((fold, stratified))
}

/// Outcome of a filter judged against the known corruption.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterAudit {
    pub noisy_removed: usize,
    pub noisy_kept: usize,
    pub clean_removed: usize,
    pub clean_kept: usize,
}

impl FilterAudit {
    pub fn total(&self) -> usize {
        self.noisy_removed + self.noisy_kept + self.clean_removed + self.clean_kept
    }

    /// The four counts as percentages of the total.
    pub fn percentages(&self) -> [f64; 4] {
        let t = self.total().max(1) as f64;
        [
            100.0 * self.noisy_removed as f64 / t,
            100.0 * self.noisy_kept as f64 / t,
            100.0 * self.clean_removed as f64 / t,
            100.0 * self.clean_kept as f64 / t,
        ]
    }

    /// Removed instances that were corrupted, over all removed.
    pub fn precision(&self) -> Option<f64> {
        let removed = self.noisy_removed + self.clean_removed;
        (removed > 0).then(|| self.noisy_removed as f64 / removed as f64)
    }

    /// Corrupted instances that were removed, over all corrupted.
    pub fn recall(&self) -> Option<f64> {
        let noisy = self.noisy_removed + self.noisy_kept;
        (noisy > 0).then(|| self.noisy_removed as f64 / noisy as f64)
    }
}

pub fn filter_decision_stats(report: &FilterReport, mask: &NoiseMask) -> FilterAudit {
    let n = report.kept.len() + report.removed.len();
    let mut removed = vec![false; n];
    for &i in &report.removed {
        removed[i] = true;
    }
    let mut audit = FilterAudit::default();
    for (i, &r) in removed.iter().enumerate() {
        match (mask.is_corrupted(i), r) {
            (true, true) => audit.noisy_removed += 1,
            (true, false) => audit.noisy_kept += 1,
            (false, true) => audit.clean_removed += 1,
            (false, false) => audit.clean_kept += 1,
        }
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0], &[1, 1]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 1, 2], &[0, 1, 2, 2]).unwrap(), 0.75);
        assert!(accuracy(&[], &[]).is_err());
        assert!(accuracy(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[3, 1], &[3, 1]).unwrap(), 0.0);
        assert_eq!(mae(&[0, 2], &[2, 0]).unwrap(), 2.0);
        assert_eq!(mae(&[1, 3], &[2, 3]).unwrap(), 0.5);
    }

    #[test]
    fn stratified_folds_balance_classes() {
        let labels: Vec<usize> = (0..100).map(|i| i % 3).collect();
        let (fold, stratified) = fold_assignment(&labels, 10, 7).unwrap();
        assert!(stratified);
        for f in 0..10 {
            let members: Vec<usize> = (0..100).filter(|&i| fold[i] == f).collect();
            assert!(members.len() == 10);
            for c in 0..3 {
                assert!(members.iter().any(|&i| labels[i] == c));
            }
        }
    }

    #[test]
    fn rare_class_falls_back() {
        let mut labels = vec![0; 30];
        labels[0] = 1;
        let (fold, stratified) = fold_assignment(&labels, 10, 1).unwrap();
        assert!(!stratified);
        assert!((0..10).all(|f| fold.iter().filter(|&&x| x == f).count() == 3));
    }

    fn report(n: usize, removed: &[usize]) -> FilterReport {
        let mask: Vec<bool> = (0..n).map(|i| removed.contains(&i)).collect();
        FilterReport::from_removed_mask("x", &mask, vec![], BTreeMap::new())
    }

    #[test]
    fn audit_examples() {
        let n = 10;
        assert_eq!(
            filter_decision_stats(&report(n, &[]), &NoiseMask::empty(0.0, 0)),
            FilterAudit { noisy_removed: 0, noisy_kept: 0, clean_removed: 0, clean_kept: n }
        );
        let mut mask = NoiseMask::empty(0.2, 0);
        mask.corrupted_indices = vec![2, 7];
        mask.original_labels = BTreeMap::from([(2, 0), (7, 1)]);
        let a = filter_decision_stats(&report(n, &[2, 7]), &mask);
        assert_eq!(a, FilterAudit { noisy_removed: 2, noisy_kept: 0, clean_removed: 0, clean_kept: 8 });
        assert!((a.percentages().iter().sum::<f64>() - 100.0).abs() < 1e-9);
        assert_eq!(a.precision(), Some(1.0));
    }
}
