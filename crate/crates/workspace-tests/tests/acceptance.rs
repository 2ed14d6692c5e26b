//! One line per acceptance criterion. Exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use common::{metric_oracle, min_relabel, monotone_dataset, random_dataset, rng, separable};
use monofilter::classifiers::{label_interval, ClassifierKind, MknnModel};
use monofilter::dataset::{compare_features, is_clash};
use monofilter::eval::{friedman_holm, run_on, Direction, ExperimentConfig, ExperimentRecord, Preprocessing};
use monofilter::filters::{run_filter, FilterKind, FilterParams};
use monofilter::io::{load_dataset, to_canonical_csv, DataFormat};
use monofilter::metrics::compute_report;
use monofilter::noise::{corrupted_count, inject_noise};
use monofilter::relabel::relabel;
use monofilter::{synth, Dominance, OrdinalDataset};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn metric_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut g = rng(1001);
    let mut mismatches = 0;
    for _ in 0..200 {
        let (n, f, c) = (g.gen_range(1..=60), g.gen_range(1..=4), g.gen_range(2..=5));
        let ds = random_dataset(&mut g, n, f, c);
        let r = compute_report(&ds);
        let o = metric_oracle(&ds);
        if r.nmi1 != o.nmi1 || r.nmi2 != o.nmi2 || r.non_comparable_pairs != o.noncomparable {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && t < Duration::from_secs(10),
        format!("200 datasets, {mismatches} mismatches, {:.2}s", t.as_secs_f64()),
    )
}

fn relabel_optimality() -> Outcome {
    let start = Instant::now();
    let mut g = rng(1002);
    let (mut wrong, mut not_monotone) = (0, 0);
    for _ in 0..100 {
        let (n, f, c) = (g.gen_range(1..=10), g.gen_range(1..=3), g.gen_range(2..=4));
        let ds = random_dataset(&mut g, n, f, c);
        let out = relabel(&ds).unwrap();
        if out.changes != min_relabel(&ds) {
            wrong += 1;
        }
        if compute_report(&out.dataset).nmi1 != 0.0 {
            not_monotone += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        wrong == 0 && not_monotone == 0 && t < Duration::from_secs(60),
        format!(
            "100 datasets, {wrong} above the exhaustive minimum, {not_monotone} with NMI1 > 0, {:.2}s",
            t.as_secs_f64()
        ),
    )
}

fn winequality() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/winequality-red.csv");
    let ds = match load_dataset(&path, DataFormat::Csv) {
        Ok(ds) => ds,
        Err(e) => return outcome(false, format!("cannot load {}: {e}", path.display())),
    };
    let find = |x: &[f64], label: &str| {
        (0..ds.len()).find(|&i| ds.features(i) == x && ds.class_names()[ds.label(i)] == label)
    };
    let high = find(&[13.5, 0.53, 0.79, 4.8, 0.12, 23.0, 77.0, 1.0018, 3.18, 0.77, 13.0], "5");
    let low = find(&[11.2, 0.28, 0.56, 1.9, 0.075, 17.0, 60.0, 0.998, 3.16, 0.58, 9.8], "6");
    let pair_ok = match (high, low) {
        (Some(a), Some(b)) => {
            compare_features(ds.features(a), ds.features(b)) == Dominance::Dominates
                && is_clash(ds.features(a), ds.label(a), ds.features(b), ds.label(b))
        }
        _ => false,
    };
    let report = compute_report(&ds);
    let clashing = report.clash_counts.iter().filter(|&&c| c > 0).count();
    outcome(
        pair_ok && clashing == 471,
        format!(
            "clash pair {}, {clashing} instances with nclash > 0 (expected 471)",
            if pair_ok { "confirmed" } else { "not found" }
        ),
    )
}

fn noise_contract() -> Outcome {
    let ds = monotone_dataset(&mut rng(1004), 200, 3, 4);
    let original = to_canonical_csv(&ds, "fixture");
    let mut failures = 0;
    for fraction in [0.1, 0.2, 0.3] {
        for seed in 0..10 {
            let (noisy, mask) = inject_noise(&ds, fraction, seed).unwrap();
            let changed: Vec<usize> = (0..200).filter(|&i| noisy.label(i) != ds.label(i)).collect();
            let adjacent = changed.iter().all(|&i| {
                let (a, b) = (ds.label(i), noisy.label(i));
                b == (a + 1) % 4 || a == (b + 1) % 4
            });
            let restored = to_canonical_csv(&mask.restore(&noisy).unwrap(), "fixture");
            let expected = (fraction * 200.0_f64).round() as usize;
            if changed.len() != expected || corrupted_count(fraction, 200) != expected || !adjacent || restored != original {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("30 (fraction, seed) cells, {failures} failures"))
}

fn mknn_interval() -> Outcome {
    let mut g = rng(1005);
    let (mut queries, mut violations) = (0, 0);
    for t in 0..100 {
        let (n, f, c) = (g.gen_range(5..=80), g.gen_range(1..=4), g.gen_range(2..=5));
        let train = monotone_dataset(&mut g, n, f, c);
        let model = MknnModel::fit(&train, 3, t).unwrap();
        for q in monotone_dataset(&mut g, 100, f, c).instances() {
            let iv = label_interval(&q.features, &model.training);
            queries += 1;
            if iv.is_empty() || !iv.contains(model.predict(&q.features)) {
                violations += 1;
            }
        }
    }
    outcome(
        queries == 10_000 && violations == 0,
        format!("{queries} queries, {violations} violations"),
    )
}

fn benchmark_runs() -> (Vec<ExperimentRecord>, Duration) {
    let datasets: Vec<(String, OrdinalDataset)> = synth::BENCHMARKS
        .iter()
        .map(|&name| (name.to_string(), synth::benchmark(name).unwrap()))
        .collect();
    let config = ExperimentConfig {
        datasets: datasets.iter().map(|(n, _)| n.clone()).collect(),
        noise_levels: vec![0.0, 0.3],
        seeds: vec![1, 2, 3],
        preprocessings: Preprocessing::ALL.to_vec(),
        classifiers: ClassifierKind::MONOTONIC.to_vec(),
        folds: 10,
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let records = run_on(&datasets, &config).unwrap();
    (records, start.elapsed())
}

type Key = (String, u64, String, &'static str);

fn means(records: &[ExperimentRecord], value: impl Fn(&ExperimentRecord) -> f64) -> BTreeMap<Key, f64> {
    let mut sums: BTreeMap<Key, (f64, usize)> = BTreeMap::new();
    for r in records {
        let key = (r.dataset.clone(), r.noise_level.to_bits(), r.preprocessing.name().to_string(), r.classifier.name());
        let e = sums.entry(key).or_default();
        e.0 += value(r);
        e.1 += 1;
    }
    sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

fn cell(m: &BTreeMap<Key, f64>, dataset: &str, level: f64, prep: &str, clf: ClassifierKind) -> f64 {
    m[&(dataset.to_string(), level.to_bits(), prep.to_string(), clf.name())]
}

fn over_datasets(m: &BTreeMap<Key, f64>, level: f64, prep: &str, clf: ClassifierKind) -> f64 {
    synth::BENCHMARKS.iter().map(|d| cell(m, d, level, prep, clf)).sum::<f64>() / synth::BENCHMARKS.len() as f64
}

fn robustness(records: &[ExperimentRecord], elapsed: Duration) -> Outcome {
    use ClassifierKind::*;
    let acc = means(records, |r| r.accuracy);
    let wins: Vec<&str> = synth::BENCHMARKS
        .iter()
        .copied()
        .filter(|d| cell(&acc, d, 0.3, "mipf", Mid) > cell(&acc, d, 0.3, "none", Mid))
        .collect();
    let a = wins.len() >= 3;
    let drop = |prep| over_datasets(&acc, 0.0, prep, Mknn) - over_datasets(&acc, 0.3, prep, Mknn);
    let b = drop("mipf") < drop("none");
    let pairs: Vec<String> = ClassifierKind::MONOTONIC
        .iter()
        .map(|&k| {
            format!(
                "{k} {:.3}/{:.3}",
                over_datasets(&acc, 0.3, "relabel", k),
                over_datasets(&acc, 0.3, "mipf", k)
            )
        })
        .collect();
    let c = ClassifierKind::MONOTONIC
        .iter()
        .all(|&k| over_datasets(&acc, 0.3, "relabel", k) < over_datasets(&acc, 0.3, "mipf", k));
    let flag = |x: bool| if x { "pass" } else { "fail" };
    outcome(
        a && b && c,
        format!(
            "(a) {} MIPF+MID beats none+MID at 30% on {}/4 [{}]; (b) {} MkNN drop MIPF {:.3} vs none {:.3}; \
             (c) {} relabel/MIPF at 30%: {}; {:.0}s",
            flag(a),
            wins.len(),
            wins.join(","),
            flag(b),
            drop("mipf"),
            drop("none"),
            flag(c),
            pairs.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn filter_ordering(records: &[ExperimentRecord]) -> Outcome {
    let mean_of = |prep: &str, value: &dyn Fn(&ExperimentRecord) -> f64| {
        let rows: Vec<f64> = records.iter().filter(|r| r.preprocessing.name() == prep).map(value).collect();
        rows.iter().sum::<f64>() / rows.len() as f64
    };
    let nmi2 = |r: &ExperimentRecord| r.train_monotonicity.nmi2;
    let size = |r: &ExperimentRecord| r.train_monotonicity.size as f64;
    let (n_mrnge, n_minffc) = (mean_of("mrnge", &nmi2), mean_of("minffc", &nmi2));
    let (s_mrnge, s_mipf) = (mean_of("mrnge", &size), mean_of("mipf", &size));
    outcome(
        n_mrnge < n_minffc && s_mrnge < s_mipf,
        format!(
            "NMI2 MRNGE {n_mrnge:.4} vs MINFFC {n_minffc:.4}; Size MRNGE {s_mrnge:.1} vs MIPF {s_mipf:.1}"
        ),
    )
}

fn statistics() -> Outcome {
    let matrix = vec![
        vec![0.80, 0.75, 0.70],
        vec![0.65, 0.70, 0.60],
        vec![0.90, 0.85, 0.85],
        vec![0.55, 0.60, 0.50],
    ];
    let names: Vec<String> = ["alg0", "alg1", "alg2"].iter().map(|s| s.to_string()).collect();
    let t = friedman_holm(&matrix, &names, Direction::HigherBetter).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let by_name = |name: &str| t.comparisons.iter().find(|c| c.algorithm == name);
    let holm_ok = match (by_name("alg1"), by_name("alg2")) {
        (Some(a1), Some(a2)) => {
            close(a1.p_value, 0.8596837951986662)
                && close(a1.p_holm, 0.8596837951986662)
                && close(a2.p_value, 0.05182992721790968)
                && close(a2.p_holm, 0.10365985443581936)
        }
        _ => false,
    };
    let fixture_ok = t.control == 0
        && close(t.statistic, 4.933333333333334)
        && close(t.p_value, 0.0848672789700174)
        && t.mean_ranks.iter().zip([1.5, 1.625, 2.875]).all(|(&a, b)| close(a, b))
        && holm_ok;

    let mut g = rng(1008);
    let mut identity_failures = 0;
    for _ in 0..1000 {
        let (blocks, k) = (g.gen_range(2..=12), g.gen_range(2..=8));
        let m: Vec<Vec<f64>> = (0..blocks)
            .map(|_| (0..k).map(|_| g.gen_range(0..5) as f64 / 4.0).collect())
            .collect();
        let names: Vec<String> = (0..k).map(|i| format!("a{i}")).collect();
        let dir = if g.gen_bool(0.5) { Direction::HigherBetter } else { Direction::LowerBetter };
        let t = friedman_holm(&m, &names, dir).unwrap();
        let kf = k as f64;
        let total = t.mean_ranks.iter().sum::<f64>() * blocks as f64;
        if (total - blocks as f64 * kf * (kf + 1.0) / 2.0).abs() > 1e-9 {
            identity_failures += 1;
        }
    }
    outcome(
        fixture_ok && identity_failures == 0,
        format!(
            "reference fixture {}, statistic {:.12}, rank-sum identity failures {identity_failures}/1000",
            if fixture_ok { "matched" } else { "mismatched" },
            t.statistic
        ),
    )
}

fn over_filtering() -> Outcome {
    let mut worst = BTreeMap::new();
    for seed in 0..10 {
        let ds = separable(&mut rng(2000 + seed), 300, 3, 0.05);
        assert_eq!(compute_report(&ds).nmi1, 0.0);
        let params = FilterParams { seed, ..FilterParams::default() };
        for kind in [FilterKind::Mipf, FilterKind::Minffc] {
            let removed = run_filter(kind, &ds, &params).unwrap().removed.len();
            let w = worst.entry(kind.name()).or_insert(0);
            *w = (*w).max(removed);
        }
    }
    let pass = worst.values().all(|&r| r * 20 <= 300);
    let detail: Vec<String> = worst.iter().map(|(k, v)| format!("{k} max {v}/300")).collect();
    outcome(pass, format!("10 seeds, {}", detail.join(", ")))
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "metric oracle equivalence", metric_oracle_equivalence()),
        (2, "relabel optimality", relabel_optimality()),
        (3, "winequality clash pair and count", winequality()),
        (4, "noise injection contract", noise_contract()),
        (5, "mknn interval invariant", mknn_interval()),
    ];
    let (records, elapsed) = benchmark_runs();
    results.push((6, "directional robustness", robustness(&records, elapsed)));
    results.push((7, "filter ordering on monotonicity", filter_ordering(&records)));
    results.push((8, "statistics correctness", statistics()));
    results.push((9, "over-filtering guard", over_filtering()));

    let mut failed = 0;
    for (id, name, o) in &results {
        println!("criterion {id}: {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
