#![allow(dead_code)]

use monofilter::OrdinalDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small integer grid so that dominance, ties and duplicates are common.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, f: usize, c: usize) -> OrdinalDataset {
    let rows = (0..n)
        .map(|_| {
            let x = (0..f).map(|_| rng.gen_range(0..4) as f64).collect();
            (x, rng.gen_range(0..c))
        })
        .collect();
    OrdinalDataset::from_rows(rows, c).unwrap()
}

/// Labels are a nondecreasing step function of the feature sum.
pub fn monotone_dataset(rng: &mut ChaCha8Rng, n: usize, f: usize, c: usize) -> OrdinalDataset {
    let rows = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..f).map(|_| rng.gen_range(0.0..1.0f64)).collect();
            let s = x.iter().sum::<f64>() / f as f64;
            let y = ((s * c as f64) as usize).min(c - 1);
            (x, y)
        })
        .collect();
    OrdinalDataset::from_rows(rows, c).unwrap()
}

/// Monotone chain on a line: x = i, label = i * c / n.
pub fn chain(n: usize, c: usize) -> OrdinalDataset {
    let rows = (0..n).map(|i| (vec![i as f64], i * c / n)).collect();
    OrdinalDataset::from_rows(rows, c).unwrap()
}

/// Points in the unit square labelled by bands of x + y, with a gap of
/// `margin` around every band edge.
pub fn separable(rng: &mut ChaCha8Rng, n: usize, c: usize, margin: f64) -> OrdinalDataset {
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let x: Vec<f64> = vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let s = (x[0] + x[1]) / 2.0 * c as f64;
        let frac = s - s.floor();
        if s.floor() > 0.0 && frac < margin || frac > 1.0 - margin && s.ceil() < c as f64 {
            continue;
        }
        rows.push((x, (s as usize).min(c - 1)));
    }
    OrdinalDataset::from_rows(rows, c).unwrap()
}

fn le(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(p, q)| p <= q)
}

fn clashes(ds: &OrdinalDataset, i: usize, j: usize) -> bool {
    let (a, b) = (ds.features(i), ds.features(j));
    let (ya, yb) = (ds.label(i), ds.label(j));
    let below = le(a, b);
    let above = le(b, a);
    if below && above {
        ya != yb
    } else {
        below && ya > yb || above && yb > ya
    }
}

pub struct Oracle {
    pub nmi1: f64,
    pub nmi2: f64,
    pub noncomparable: u64,
    pub counts: Vec<usize>,
}

pub fn metric_oracle(ds: &OrdinalDataset) -> Oracle {
    let n = ds.len();
    let mut counts = vec![0; n];
    let mut noncomparable = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if clashes(ds, i, j) {
                counts[i] += 1;
            }
            if i < j && !le(ds.features(i), ds.features(j)) && !le(ds.features(j), ds.features(i)) {
                noncomparable += 1;
            }
        }
    }
    let total: usize = counts.iter().sum();
    let (nmi1, nmi2) = if n < 2 {
        (0.0, 0.0)
    } else {
        (
            total as f64 / (n * (n - 1)) as f64,
            counts.iter().filter(|&&c| c > 0).count() as f64 / n as f64,
        )
    };
    Oracle { nmi1, nmi2, noncomparable, counts }
}

pub fn clash_pair_count(ds: &OrdinalDataset) -> usize {
    metric_oracle(ds).counts.iter().sum::<usize>() / 2
}

/// Fewest label changes that make `ds` monotone, by depth-first search over
/// every labelling with a running bound.
pub fn min_relabel(ds: &OrdinalDataset) -> usize {
    let n = ds.len();
    let c = ds.class_count();
    let mut labels = vec![0; n];
    let mut best = n;
    fn go(ds: &OrdinalDataset, c: usize, i: usize, changed: usize, labels: &mut Vec<usize>, best: &mut usize) {
        if changed >= *best {
            return;
        }
        if i == ds.len() {
            *best = changed;
            return;
        }
        let original = ds.label(i);
        let order = std::iter::once(original).chain((0..c).filter(|&y| y != original));
        for y in order {
            let ok = (0..i).all(|j| {
                let (a, b) = (ds.features(i), ds.features(j));
                let below = le(a, b);
                let above = le(b, a);
                if below && above {
                    y == labels[j]
                } else {
                    !(below && y > labels[j] || above && labels[j] > y)
                }
            });
            if ok {
                labels[i] = y;
                go(ds, c, i + 1, changed + usize::from(y != original), labels, best);
            }
        }
    }
    go(ds, c, 0, 0, &mut labels, &mut best);
    best
}
