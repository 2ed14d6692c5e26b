//! Optimal monotone relabelling.
//!
//! Clashing pairs form a comparability graph: orienting each clash from the
//! instance with the weakly smaller feature vector (and therefore the larger
//! label) to the other gives a strict partial order, because both feature
//! dominance and the reversed label order are transitive. A maximum
//! independent set of the violation graph is then a maximum antichain of that
//! order. It is found through Dilworth's theorem: the minimum chain cover is a
//! minimum flow through the split network of the order, solved here as a
//! maximum bipartite matching between out-copies and in-copies of the
//! vertices (chains = n − matching).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dataset::{compare_features, weakly_below, Dominance, OrdinalDataset};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationGraph {
    pub vertex_count: usize,
    /// Clashing pairs `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
    /// `succ[u]` lists `v` such that `u` precedes `v` in the violation order.
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl ViolationGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.succ[v].len() + self.pred[v].len()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[v].iter().chain(&self.pred[v]).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.vertex_count];
        for &v in set {
            member[v] = true;
        }
        self.edges.iter().all(|&(a, b)| !(member[a] && member[b]))
    }
}

pub fn build_violation_graph(ds: &OrdinalDataset) -> ViolationGraph {
    let n = ds.len();
    let mut edges = Vec::new();
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for i in 0..n {
        let (xi, yi) = (ds.features(i), ds.label(i));
        for j in (i + 1)..n {
            let (xj, yj) = (ds.features(j), ds.label(j));
            // (from, to): `from` has weakly smaller features and larger label
            let arc = match compare_features(xi, xj) {
                Dominance::Equal if yi > yj => Some((i, j)),
                Dominance::Equal if yj > yi => Some((j, i)),
                Dominance::DominatedBy if yi > yj => Some((i, j)),
                Dominance::Dominates if yj > yi => Some((j, i)),
                _ => None,
            };
            if let Some((u, v)) = arc {
                edges.push((i, j));
                succ[u].push(v);
                pred[v].push(u);
            }
        }
    }
    ViolationGraph {
        vertex_count: n,
        edges,
        succ,
        pred,
    }
}

const NONE: usize = usize::MAX;

/// Bipartite matching between out-copies and in-copies of the live vertices,
/// kept maximum across vertex deletions.
#[derive(Clone)]
struct ChainMatching<'g> {
    graph: &'g ViolationGraph,
    alive: Vec<bool>,
    alive_count: usize,
    mate_out: Vec<usize>,
    mate_in: Vec<usize>,
    size: usize,
}

impl<'g> ChainMatching<'g> {
    fn new(graph: &'g ViolationGraph, alive: Vec<bool>) -> Self {
        let n = graph.vertex_count;
        let alive_count = alive.iter().filter(|&&a| a).count();
        let mut m = ChainMatching {
            graph,
            alive,
            alive_count,
            mate_out: vec![NONE; n],
            mate_in: vec![NONE; n],
            size: 0,
        };
        m.maximize();
        m
    }

    /// Size of a maximum antichain among the live vertices.
    fn antichain_size(&self) -> usize {
        self.alive_count - self.size
    }

    fn remove(&mut self, v: usize) {
        if !self.alive[v] {
            return;
        }
        self.alive[v] = false;
        self.alive_count -= 1;
        if self.mate_out[v] != NONE {
            self.mate_in[self.mate_out[v]] = NONE;
            self.mate_out[v] = NONE;
            self.size -= 1;
        }
        if self.mate_in[v] != NONE {
            self.mate_out[self.mate_in[v]] = NONE;
            self.mate_in[v] = NONE;
            self.size -= 1;
        }
    }

    /// Hopcroft-Karp phases starting from the current matching.
    fn maximize(&mut self) {
        let n = self.graph.vertex_count;
        let mut dist = vec![usize::MAX; n];
        loop {
            let mut queue = VecDeque::new();
            for u in 0..n {
                if self.alive[u] && self.mate_out[u] == NONE {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = usize::MAX;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for &v in &self.graph.succ[u] {
                    if !self.alive[v] {
                        continue;
                    }
                    let w = self.mate_in[v];
                    if w == NONE {
                        found = true;
                    } else if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if !found {
                return;
            }
            let mut cursor = vec![0usize; n];
            for u in 0..n {
                if self.alive[u] && self.mate_out[u] == NONE && self.augment(u, &mut dist, &mut cursor) {
                    self.size += 1;
                }
            }
        }
    }

    fn augment(&mut self, root: usize, dist: &mut [usize], cursor: &mut [usize]) -> bool {
        // iterative DFS along the BFS layers
        let mut stack = vec![root];
        let mut path: Vec<(usize, usize)> = Vec::new();
        while let Some(&u) = stack.last() {
            let succ = &self.graph.succ[u];
            let mut advanced = false;
            while cursor[u] < succ.len() {
                let v = succ[cursor[u]];
                cursor[u] += 1;
                if !self.alive[v] {
                    continue;
                }
                let w = self.mate_in[v];
                if w == NONE {
                    path.push((u, v));
                    for &(a, b) in &path {
                        self.mate_out[a] = b;
                        self.mate_in[b] = a;
                    }
                    return true;
                }
                if dist[w] == dist[u] + 1 {
                    path.push((u, v));
                    stack.push(w);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                dist[u] = usize::MAX;
                stack.pop();
                path.pop();
            }
        }
        false
    }
}

/// A maximum independent set of the violation graph; among all maximum sets
/// the lexicographically smallest sorted index list is returned.
pub fn max_independent_set(graph: &ViolationGraph) -> Vec<usize> {
    let n = graph.vertex_count;
    let alive: Vec<bool> = (0..n).map(|v| graph.degree(v) > 0).collect();
    let mut chosen: Vec<usize> = (0..n).filter(|&v| graph.degree(v) == 0).collect();
    let mut matching = ChainMatching::new(graph, alive);
    let mut target = matching.antichain_size();

    for v in 0..n {
        if target == 0 {
            break;
        }
        if !matching.alive[v] {
            continue;
        }
        // an unmatched vertex on both sides is a singleton chain of a minimum
        // chain cover, so every maximum antichain contains it
        let forced = matching.mate_out[v] == NONE && matching.mate_in[v] == NONE;
        let mut trial = matching.clone();
        trial.remove(v);
        for w in graph.neighbours(v) {
            trial.remove(w);
        }
        trial.maximize();
        if forced || trial.antichain_size() + 1 == target {
            debug_assert_eq!(trial.antichain_size() + 1, target);
            chosen.push(v);
            matching = trial;
            target -= 1;
        } else {
            matching.remove(v);
            matching.maximize();
            debug_assert_eq!(matching.antichain_size(), target);
        }
    }
    chosen.sort_unstable();
    chosen
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelChange {
    pub index: usize,
    pub old_label: usize,
    pub new_label: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelabelResult {
    pub dataset: OrdinalDataset,
    /// Instances outside the kept independent set, ascending.
    pub changed_indices: Vec<usize>,
    pub changes: usize,
    pub log: Vec<LabelChange>,
    /// Instances whose interval was empty and that were clamped to the lower
    /// bound. Zero for every input the construction admits.
    pub clamped: Vec<usize>,
}

/// Relabels the complement of a maximum independent set.
///
/// Relabelled instances are visited in lexicographic feature order, a linear
/// extension of dominance, and get the label closest to their original one
/// inside the interval imposed by the kept and already assigned instances.
pub fn relabel(ds: &OrdinalDataset) -> Result<RelabelResult> {
    let graph = build_violation_graph(ds);
    if graph.edges.is_empty() {
        return Ok(RelabelResult {
            dataset: ds.clone(),
            changed_indices: Vec::new(),
            changes: 0,
            log: Vec::new(),
            clamped: Vec::new(),
        });
    }
    let keep = max_independent_set(&graph);
    let n = ds.len();
    let mut fixed = vec![false; n];
    for &k in &keep {
        fixed[k] = true;
    }
    let mut changed: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let mut labels = ds.labels();
    let top = ds.class_count() - 1;

    let mut order = changed.clone();
    order.sort_by(|&a, &b| {
        let (xa, xb) = (ds.features(a), ds.features(b));
        xa.iter()
            .zip(xb)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut clamped = Vec::new();
    for &i in &order {
        let xi = ds.features(i);
        let (mut lo, mut hi) = (0usize, top);
        for j in 0..n {
            if !fixed[j] {
                continue;
            }
            let xj = ds.features(j);
            if weakly_below(xj, xi) {
                lo = lo.max(labels[j]);
            }
            if weakly_below(xi, xj) {
                hi = hi.min(labels[j]);
            }
        }
        let original = ds.label(i);
        labels[i] = if lo > hi {
            clamped.push(i);
            lo
        } else {
            original.clamp(lo, hi)
        };
        fixed[i] = true;
    }

    let log: Vec<LabelChange> = changed
        .iter()
        .map(|&i| LabelChange {
            index: i,
            old_label: ds.label(i),
            new_label: labels[i],
        })
        .collect();
    changed.sort_unstable();
    let dataset = ds.with_labels(&labels)?;
    Ok(RelabelResult {
        dataset,
        changes: changed.len(),
        changed_indices: changed,
        log,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::compute_report;

    fn ds(rows: &[(&[f64], usize)], c: usize) -> OrdinalDataset {
        OrdinalDataset::from_rows(rows.iter().map(|(x, y)| (x.to_vec(), *y)).collect(), c).unwrap()
    }

    /// Lexicographically smallest maximum independent set by enumeration.
    fn brute_force_mis(g: &ViolationGraph) -> Vec<usize> {
        let n = g.vertex_count;
        let mut best: Option<Vec<usize>> = None;
        for mask in 0u32..(1 << n) {
            if g.edges.iter().any(|&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1) {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            best = match best {
                None => Some(set),
                Some(b) if set.len() > b.len() || (set.len() == b.len() && set < b) => Some(set),
                keep => keep,
            };
        }
        best.unwrap()
    }

    #[test]
    fn monotone_has_no_edges() {
        let d = ds(&[(&[1.], 0), (&[2.], 1), (&[3.], 2)], 3);
        let g = build_violation_graph(&d);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(max_independent_set(&g), vec![0, 1, 2]);
        let r = relabel(&d).unwrap();
        assert_eq!(r.changes, 0);
        assert_eq!(r.dataset, d);
    }

    #[test]
    fn single_edge() {
        let d = ds(&[(&[1.], 0), (&[2.], 2), (&[3.], 1)], 3);
        let g = build_violation_graph(&d);
        assert_eq!(g.edges, vec![(1, 2)]);
        let s = max_independent_set(&g);
        assert_eq!(s, brute_force_mis(&g));
        assert_eq!(s, vec![0, 1]);
        let r = relabel(&d).unwrap();
        assert_eq!(r.changes, 1);
        assert_eq!(compute_report(&r.dataset).nmi1, 0.0);
        // (3) raised from 1 to 2, the nearest feasible label
        assert_eq!(r.dataset.labels(), vec![0, 2, 2]);
    }

    #[test]
    fn identical_features_triangle() {
        let d = ds(&[(&[1.], 1), (&[1.], 0), (&[1.], 2)], 3);
        let g = build_violation_graph(&d);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(max_independent_set(&g), vec![0]);
        let r = relabel(&d).unwrap();
        assert_eq!(r.changes, 2);
        assert_eq!(r.dataset.labels(), vec![1, 1, 1]);
    }

    #[test]
    fn identical_pair() {
        let d = ds(&[(&[1.], 1), (&[1.], 0)], 2);
        let r = relabel(&d).unwrap();
        assert_eq!(r.changes, 1);
        let l = r.dataset.labels();
        assert_eq!(l[0], l[1]);
        assert!(r.clamped.is_empty());
    }

    #[test]
    fn relabelled_instances_stay_mutually_consistent() {
        // 0 and 1 both lose to the chain {2, 3}; they must not clash afterwards
        let d = ds(&[(&[1.], 3), (&[2.], 0), (&[1.5], 1), (&[1.6], 1), (&[1.7], 1)], 4);
        let r = relabel(&d).unwrap();
        assert_eq!(compute_report(&r.dataset).nmi1, 0.0);
        assert_eq!(r.changes, 2);
    }
}
