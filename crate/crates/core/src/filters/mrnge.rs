use std::collections::{BTreeMap, BTreeSet};

use super::{FilterReport, IterationRecord};
use super::menn::neighbour_interval;
use crate::classifiers::{vote, VoteTieBreak};
use crate::dataset::{squared_distance, OrdinalDataset};
use crate::error::{Error, Result};
use crate::par;

/// Adjacency lists of the proximity graph: `(i, j)` is an edge when
/// `d_ij^2 <= d_ik^2 + d_jk^2` for every other point `k`.
pub fn gabriel_graph(ds: &OrdinalDataset) -> Vec<Vec<usize>> {
    let n = ds.len();
    let dist: Vec<Vec<f64>> = par::map_range(n, |i| {
        (0..n).map(|j| squared_distance(ds.features(i), ds.features(j))).collect()
    });
    // try the points nearest to i first so most non-edges fail early
    let rows: Vec<Vec<usize>> = par::map_range(n, |i| {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| dist[i][a].total_cmp(&dist[i][b]).then(a.cmp(&b)));
        let mut adj = Vec::new();
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = dist[i][j];
            let admitted = order
                .iter()
                .all(|&k| k == i || k == j || dij <= dist[i][k] + dist[j][k]);
            if admitted {
                adj.push(j);
            }
        }
        adj
    });
    rows
}

/// Monotonic relative neighbourhood graph editing with first-order edition:
/// only instances whose graph neighbours (restricted to labels in the
/// instance's monotone interval) outvote them are examined further.
pub fn mrnge(ds: &OrdinalDataset) -> Result<FilterReport> {
    let n = ds.len();
    if n < 2 {
        return Err(Error::InvalidParameter("mrnge needs at least 2 instances".into()));
    }
    let graph = gabriel_graph(ds);
    let removed = par::map_range(n, |i| {
        let y = ds.label(i);
        let iv = neighbour_interval(ds, i);
        let labels = graph[i].iter().map(|&j| ds.label(j)).filter(|&l| iv.contains(l));
        let first = vote(labels, ds.class_count(), VoteTieBreak::Midpoint(iv));
        if first.is_none_or(|v| v == y) {
            return false;
        }
        let region: BTreeSet<usize> = std::iter::once(i)
            .chain(graph[i].iter().copied().filter(|&j| ds.label(j) == y))
            .collect();
        let outer: BTreeSet<usize> = region
            .iter()
            .flat_map(|&r| graph[r].iter().copied())
            .filter(|j| !region.contains(j))
            .collect();
        let different = outer.iter().filter(|&&j| ds.label(j) != y).count();
        2 * different > outer.len()
    });
    let count = removed.iter().filter(|&&r| r).count();
    let params = BTreeMap::from([("first_order_edition".to_string(), "true".to_string())]);
    Ok(FilterReport::from_removed_mask(
        "mrnge",
        &removed,
        vec![IterationRecord { removed: count, good: 0 }],
        params,
    ))
}
