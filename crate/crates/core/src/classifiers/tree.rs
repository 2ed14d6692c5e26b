//! C4.5-style decision trees on numeric attributes.
//!
//! With `ambiguity_weight = 0` this is a plain (ordinal-unaware) C4.5 tree:
//! binary splits at midpoints between consecutive distinct values, gain-ratio
//! selection among attributes with at least average gain, and error-based
//! pruning. A positive weight turns it into the monotone induction variant:
//! each candidate split is penalized by the weight times its order
//! ambiguity, the non-monotonicity index of the two-point dataset formed by
//! the children's majority labels placed at the children's positions.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::Classifier;
use crate::dataset::OrdinalDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// Pruning confidence factor.
    pub confidence: f64,
    /// Minimum number of instances per leaf.
    pub min_leaf: usize,
    /// Weight of the order-ambiguity penalty (`R`); 0 disables it.
    pub ambiguity_weight: f64,
    pub prune: bool,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            confidence: 0.25,
            min_leaf: 2,
            ambiguity_weight: 0.0,
            prune: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        label: usize,
        counts: Vec<f64>,
    },
    Split {
        attribute: usize,
        threshold: f64,
        counts: Vec<f64>,
        /// Instances with `x[attribute] <= threshold`.
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn counts(&self) -> &[f64] {
        match self {
            Node::Leaf { counts, .. } | Node::Split { counts, .. } => counts,
        }
    }

    fn leaf_from(counts: Vec<f64>) -> Node {
        Node::Leaf {
            label: argmax(&counts),
            counts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub class_count: usize,
    pub attribute_names: Vec<String>,
    pub params: TreeParams,
    pub root: Node,
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn entropy(counts: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum()
}

/// Upper confidence bound on extra errors at a leaf (C4.5's `addErrs`).
pub fn added_errors(n: f64, e: f64, cf: f64) -> f64 {
    if cf > 0.5 {
        return 0.0;
    }
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = Normal::standard().inverse_cdf(1.0 - cf);
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt()) / (1.0 + z * z / n);
    r * n - e
}

struct SplitChoice {
    attribute: usize,
    threshold: f64,
}

struct Builder<'a> {
    rows: Vec<&'a [f64]>,
    labels: &'a [usize],
    class_count: usize,
    params: &'a TreeParams,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<f64> {
        let mut counts = vec![0.0; self.class_count];
        for &i in idx {
            counts[self.labels[i]] += 1.0;
        }
        counts
    }

    fn build(&self, idx: Vec<usize>) -> Node {
        let counts = self.counts(&idx);
        let n = idx.len() as f64;
        let majority = counts[argmax(&counts)];
        if idx.len() < 2 * self.params.min_leaf || majority == n {
            return Node::leaf_from(counts);
        }
        match self.best_split(&idx, &counts) {
            None => Node::leaf_from(counts),
            Some(choice) => {
                let (left, right): (Vec<usize>, Vec<usize>) = idx
                    .iter()
                    .partition(|&&i| self.rows[i][choice.attribute] <= choice.threshold);
                Node::Split {
                    attribute: choice.attribute,
                    threshold: choice.threshold,
                    counts,
                    left: Box::new(self.build(left)),
                    right: Box::new(self.build(right)),
                }
            }
        }
    }

    fn best_split(&self, idx: &[usize], counts: &[f64]) -> Option<SplitChoice> {
        let n = idx.len() as f64;
        let c = self.class_count;
        let base = entropy(counts, n);
        let min_split = (0.1 * n / c as f64).clamp(self.params.min_leaf as f64, 25.0);
        let weight = self.params.ambiguity_weight;

        // per attribute: (adjusted gain, gain ratio, ambiguity, threshold)
        let mut per_attr: Vec<Option<(f64, f64, f64, f64)>> = Vec::new();
        let mut order = idx.to_vec();
        for a in 0..self.rows[idx[0]].len() {
            order.sort_by(|&p, &q| self.rows[p][a].total_cmp(&self.rows[q][a]));
            let mut left = vec![0.0; c];
            let mut right = counts.to_vec();
            let mut best: Option<(f64, f64, f64, f64, f64)> = None; // score, gain, amb, thr, nl
            let mut candidates = 0usize;
            for p in 0..order.len() - 1 {
                let y = self.labels[order[p]];
                left[y] += 1.0;
                right[y] -= 1.0;
                let (v, w) = (self.rows[order[p]][a], self.rows[order[p + 1]][a]);
                if v >= w {
                    continue;
                }
                let nl = (p + 1) as f64;
                let nr = n - nl;
                if nl < min_split || nr < min_split {
                    continue;
                }
                candidates += 1;
                let gain = base - (nl / n) * entropy(&left, nl) - (nr / n) * entropy(&right, nr);
                let ambiguity = if argmax(&left) > argmax(&right) {
                    2.0 * nl * nr / (n * (n - 1.0))
                } else {
                    0.0
                };
                let score = gain - weight * ambiguity;
                if best.is_none_or(|b| score > b.0 + 1e-12) {
                    best = Some((score, gain, ambiguity, v + (w - v) / 2.0, nl));
                }
            }
            per_attr.push(best.and_then(|(_, gain, amb, thr, nl)| {
                let adjusted = gain - (candidates as f64).log2() / n;
                if adjusted <= 0.0 {
                    return None;
                }
                let nr = n - nl;
                let split_info = -(nl / n) * (nl / n).log2() - (nr / n) * (nr / n).log2();
                Some((adjusted, adjusted / split_info, amb, thr))
            }));
        }

        // the average-gain filter sees the penalized gain too
        let valid: Vec<f64> = per_attr.iter().flatten().map(|s| s.0 - weight * s.2).collect();
        if valid.is_empty() {
            return None;
        }
        let avg_gain = valid.iter().sum::<f64>() / valid.len() as f64;
        let mut choice: Option<(f64, usize, f64)> = None;
        for (a, s) in per_attr.iter().enumerate() {
            let Some((gain, ratio, amb, thr)) = *s else { continue };
            if gain - weight * amb < avg_gain - 1e-3 {
                continue;
            }
            let score = ratio - weight * amb;
            if choice.is_none_or(|(best, _, _)| score > best + 1e-12) {
                choice = Some((score, a, thr));
            }
        }
        choice.map(|(_, attribute, threshold)| SplitChoice { attribute, threshold })
    }
}

/// Bottom-up subtree replacement; returns the estimated error of `node`.
fn prune(node: &mut Node, cf: f64) -> f64 {
    let counts = node.counts().to_vec();
    let n: f64 = counts.iter().sum();
    let errors = n - counts[argmax(&counts)];
    let as_leaf = errors + added_errors(n, errors, cf);
    match node {
        Node::Leaf { .. } => as_leaf,
        Node::Split { left, right, .. } => {
            let subtree = prune(left, cf) + prune(right, cf);
            if as_leaf <= subtree + 0.1 {
                *node = Node::leaf_from(counts);
                as_leaf
            } else {
                subtree
            }
        }
    }
}

impl DecisionTree {
    pub fn fit(ds: &OrdinalDataset, params: &TreeParams) -> Self {
        DecisionTree::fit_labels(ds, &ds.labels(), ds.class_count(), params)
    }

    /// Fits against `labels` (in `0..class_count`) instead of the dataset's.
    pub fn fit_labels(ds: &OrdinalDataset, labels: &[usize], class_count: usize, params: &TreeParams) -> Self {
        let builder = Builder {
            rows: ds.instances().iter().map(|x| x.features.as_slice()).collect(),
            labels,
            class_count,
            params,
        };
        let mut root = builder.build((0..ds.len()).collect());
        if params.prune {
            prune(&mut root, params.confidence);
        }
        DecisionTree {
            class_count,
            attribute_names: ds.attributes().iter().map(|a| a.name.clone()).collect(),
            params: params.clone(),
            root,
        }
    }

    fn leaf(&self, x: &[f64]) -> &Node {
        let mut node = &self.root;
        while let Node::Split {
            attribute,
            threshold,
            left,
            right,
            ..
        } = node
        {
            node = if x[*attribute] <= *threshold { left } else { right };
        }
        node
    }

    /// Class frequencies at the leaf reached by `x`.
    pub fn leaf_counts(&self, x: &[f64]) -> &[f64] {
        self.leaf(x).counts()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        match self.leaf(x) {
            Node::Leaf { label, .. } => *label,
            Node::Split { .. } => unreachable!("descent ends at a leaf"),
        }
    }

    pub fn leaf_count(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Split { left, right, .. } => walk(left) + walk(right),
            }
        }
        walk(&self.root)
    }

    /// `(attribute, threshold)` of the root split, if any.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.root {
            Node::Split { attribute, threshold, .. } => Some((*attribute, *threshold)),
            Node::Leaf { .. } => None,
        }
    }

    /// One rule per branch, e.g. `alcohol > 10.5 AND sulphates <= 0.6 => 2`.
    pub fn branches(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_rules(&self.root, &mut path, &mut out);
        out
    }

    fn collect_rules(&self, node: &Node, path: &mut Vec<String>, out: &mut Vec<String>) {
        match node {
            Node::Leaf { label, .. } => {
                let cond = if path.is_empty() {
                    "TRUE".to_string()
                } else {
                    path.join(" AND ")
                };
                out.push(format!("{cond} => {label}"));
            }
            Node::Split {
                attribute,
                threshold,
                left,
                right,
                ..
            } => {
                let name = self
                    .attribute_names
                    .get(*attribute)
                    .cloned()
                    .unwrap_or_else(|| format!("a{attribute}"));
                path.push(format!("{name} <= {threshold}"));
                self.collect_rules(left, path, out);
                path.pop();
                path.push(format!("{name} > {threshold}"));
                self.collect_rules(right, path, out);
                path.pop();
            }
        }
    }
}

impl Classifier for DecisionTree {
    fn predict(&self, x: &[f64]) -> usize {
        DecisionTree::predict(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: Vec<(Vec<f64>, usize)>, c: usize) -> OrdinalDataset {
        OrdinalDataset::from_rows(rows, c).unwrap()
    }

    #[test]
    fn pure_data_is_single_leaf() {
        let d = ds((0..10).map(|i| (vec![i as f64], 1)).collect(), 3);
        let t = DecisionTree::fit(&d, &TreeParams::default());
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.predict(&[100.0]), 1);
    }

    #[test]
    fn step_splits_at_midpoint() {
        let d = ds((0..10).map(|i| (vec![i as f64], usize::from(i >= 5))).collect(), 2);
        for weight in [0.0, 1.0] {
            let params = TreeParams {
                ambiguity_weight: weight,
                ..TreeParams::default()
            };
            let t = DecisionTree::fit(&d, &params);
            assert_eq!(t.root_split(), Some((0, 4.5)));
            assert_eq!(t.leaf_count(), 2);
            assert_eq!(t.predict(&[3.0]), 0);
            assert_eq!(t.predict(&[7.0]), 1);
        }
    }

    #[test]
    fn ambiguity_penalty_prefers_monotone_split() {
        // attribute 0 separates the classes in reverse order, attribute 1 in
        // order but with one error on each side
        let mut rows = Vec::new();
        for i in 0..20 {
            let y = usize::from(i >= 10);
            let a0 = if y == 1 { i as f64 - 10.0 } else { i as f64 + 10.0 };
            let a1 = if i == 0 || i == 19 { (19 - i) as f64 } else { i as f64 };
            rows.push((vec![a0, a1], y));
        }
        let d = ds(rows, 2);
        let plain = DecisionTree::fit(&d, &TreeParams::default());
        assert_eq!(plain.root_split().map(|s| s.0), Some(0));
        let mid = DecisionTree::fit(
            &d,
            &TreeParams {
                ambiguity_weight: 1.0,
                ..TreeParams::default()
            },
        );
        assert_eq!(mid.root_split().map(|s| s.0), Some(1));
    }

    #[test]
    fn added_errors_reference_values() {
        // zero errors: n * (1 - cf^(1/n))
        assert!((added_errors(6.0, 0.0, 0.25) - 6.0 * (1.0 - 0.25f64.powf(1.0 / 6.0))).abs() < 1e-12);
        // Wilson-style upper bound, evaluated with scipy
        assert!((added_errors(10.0, 2.0, 0.25) - 1.5185775066157587).abs() < 1e-9);
        assert_eq!(added_errors(3.0, 3.0, 0.25), 0.0);
    }

    #[test]
    fn noise_leaf_pruned_away() {
        // one stray label inside a pure region should not keep its own leaf
        let mut rows: Vec<(Vec<f64>, usize)> = (0..40).map(|i| (vec![i as f64], usize::from(i >= 20))).collect();
        rows[5].1 = 1;
        rows[6].1 = 1;
        let t = DecisionTree::fit(&ds(rows, 2), &TreeParams::default());
        assert_eq!(t.predict(&[5.0]), 0);
        assert!(t.leaf_count() <= 3);
    }

    #[test]
    fn branches_export() {
        let d = ds((0..10).map(|i| (vec![i as f64], usize::from(i >= 5))).collect(), 2);
        let t = DecisionTree::fit(&d, &TreeParams::default());
        assert_eq!(t.branches(), vec!["a1 <= 4.5 => 0", "a1 > 4.5 => 1"]);
    }
}
