mod common;

use common::{clash_pair_count, metric_oracle, min_relabel, monotone_dataset, random_dataset, rng};
use monofilter::classifiers::{label_interval, MknnModel, OlmModel, OsdlModel, OsdlParams};
use monofilter::dataset::compare_features;
use monofilter::eval::{block_ranks, Direction};
use monofilter::filters::{run_filter, FilterKind, FilterParams};
use monofilter::metrics::compute_report;
use monofilter::noise::{corrupted_count, inject_noise};
use monofilter::relabel::relabel;
use monofilter::{Dominance, OrdinalDataset};
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = OrdinalDataset> {
    (any::<u64>(), 1usize..40, 1usize..4, 2usize..5)
        .prop_map(|(seed, n, f, c)| random_dataset(&mut rng(seed), n, f, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn report_matches_pairwise_oracle(ds in dataset()) {
        let r = compute_report(&ds);
        let o = metric_oracle(&ds);
        prop_assert_eq!(r.nmi1, o.nmi1);
        prop_assert_eq!(r.nmi2, o.nmi2);
        prop_assert_eq!(r.non_comparable_pairs, o.noncomparable);
        prop_assert_eq!(&r.clash_counts, &o.counts);
        prop_assert_eq!(r.nmi1 == 0.0, r.nmi2 == 0.0);
    }

    #[test]
    fn report_ignores_row_order(ds in dataset(), shift in 0usize..40) {
        let n = ds.len();
        let order: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let moved = ds.subset(&order).unwrap();
        let (a, b) = (compute_report(&ds), compute_report(&moved));
        prop_assert_eq!(a.nmi1, b.nmi1);
        prop_assert_eq!(a.nmi2, b.nmi2);
        prop_assert_eq!(a.non_comparable_pairs, b.non_comparable_pairs);
        for (k, &i) in order.iter().enumerate() {
            prop_assert_eq!(b.clash_counts[k], a.clash_counts[i]);
        }
    }

    #[test]
    fn removal_never_adds_clashes(ds in dataset(), drop in 0usize..40) {
        prop_assume!(ds.len() > 1);
        let drop = drop % ds.len();
        let rest: Vec<usize> = (0..ds.len()).filter(|&i| i != drop).collect();
        let before = compute_report(&ds).clash_counts;
        let after = compute_report(&ds.subset(&rest).unwrap()).clash_counts;
        for (k, &i) in rest.iter().enumerate() {
            prop_assert!(after[k] <= before[i]);
        }
    }

    #[test]
    fn dominance_is_a_partial_order(ds in dataset()) {
        let n = ds.len();
        for i in 0..n {
            for j in 0..n {
                let d = compare_features(ds.features(i), ds.features(j));
                prop_assert_eq!(compare_features(ds.features(j), ds.features(i)), d.reverse());
                if i == j {
                    prop_assert_eq!(d, Dominance::Equal);
                }
                for k in 0..n.min(12) {
                    let e = compare_features(ds.features(j), ds.features(k));
                    if d == Dominance::DominatedBy && e == Dominance::DominatedBy {
                        prop_assert_eq!(compare_features(ds.features(i), ds.features(k)), Dominance::DominatedBy);
                    }
                }
            }
        }
    }

    #[test]
    fn relabel_is_minimal_and_monotone(seed in any::<u64>(), n in 1usize..9, f in 1usize..3, c in 2usize..5) {
        let ds = random_dataset(&mut rng(seed), n, f, c);
        let out = relabel(&ds).unwrap();
        prop_assert_eq!(compute_report(&out.dataset).nmi1, 0.0);
        prop_assert_eq!(out.changes, min_relabel(&ds));
        prop_assert_eq!(out.changes, out.log.len());
        prop_assert!(out.clamped.is_empty());
        prop_assert_eq!(relabel(&out.dataset).unwrap().changes, 0);
        for i in 0..n {
            prop_assert_eq!(out.dataset.features(i), ds.features(i));
        }
    }

    #[test]
    fn noise_contract(ds in dataset(), fraction in 0.0f64..=1.0, seed in any::<u64>()) {
        let (noisy, mask) = inject_noise(&ds, fraction, seed).unwrap();
        let c = ds.class_count();
        let changed: Vec<usize> = (0..ds.len()).filter(|&i| noisy.label(i) != ds.label(i)).collect();
        prop_assert_eq!(mask.corrupted_indices.len(), corrupted_count(fraction, ds.len()));
        prop_assert_eq!(&changed, &mask.corrupted_indices);
        for &i in &changed {
            let (a, b) = (ds.label(i), noisy.label(i));
            prop_assert!(b == (a + 1) % c || a == (b + 1) % c);
            prop_assert_eq!(noisy.features(i), ds.features(i));
        }
        prop_assert_eq!(&mask.restore(&noisy).unwrap(), &ds);
        let (again, _) = inject_noise(&ds, fraction, seed).unwrap();
        prop_assert_eq!(again, noisy);
    }

    #[test]
    fn mknn_stays_in_interval(seed in any::<u64>(), n in 1usize..40, f in 1usize..4, c in 2usize..5, k in 1usize..6) {
        let mut r = rng(seed);
        let train = monotone_dataset(&mut r, n, f, c);
        let model = MknnModel::fit(&train, k, seed).unwrap();
        prop_assert_eq!(&model.training, &train);
        for q in monotone_dataset(&mut r, 20, f, c).instances() {
            let iv = label_interval(&q.features, &train);
            prop_assert!(!iv.is_empty());
            prop_assert!(iv.contains(model.predict(&q.features)));
        }
    }

    #[test]
    fn osdl_between_bounds(seed in any::<u64>(), n in 2usize..40, f in 1usize..4, c in 2usize..5) {
        let mut r = rng(seed);
        let train = monotone_dataset(&mut r, n, f, c);
        let model = OsdlModel::fit(&train, OsdlParams::default());
        for q in monotone_dataset(&mut r, 20, f, c).instances() {
            if let (Some(lo), Some(hi)) = model.bounds(&q.features) {
                let y = model.predict(&q.features);
                prop_assert!(lo <= y && y <= hi);
            }
        }
    }

    #[test]
    fn olm_is_monotone_on_covered_inputs(ds in dataset(), seed in any::<u64>()) {
        let model = OlmModel::fit(&ds);
        let queries = random_dataset(&mut rng(seed), 30, ds.feature_count(), 2);
        for a in queries.instances() {
            for b in queries.instances() {
                if let (Some(_), Some(_)) = (model.dominated_max(&a.features), model.dominated_max(&b.features)) {
                    if compare_features(&a.features, &b.features) == Dominance::DominatedBy {
                        prop_assert!(model.predict(&a.features) <= model.predict(&b.features));
                    }
                }
            }
        }
    }

    #[test]
    fn block_ranks_sum(scores in prop::collection::vec(0u8..4, 2..8)) {
        let values: Vec<f64> = scores.iter().map(|&s| s as f64).collect();
        let a = values.len() as f64;
        for dir in [Direction::HigherBetter, Direction::LowerBetter] {
            let ranks = block_ranks(&values, dir);
            prop_assert!((ranks.iter().sum::<f64>() - a * (a + 1.0) / 2.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn filters_keep_a_subset(seed in any::<u64>(), n in 10usize..60, c in 2usize..4) {
        let mut r = rng(seed);
        let (ds, _) = inject_noise(&monotone_dataset(&mut r, n, 2, c), 0.2, seed).unwrap();
        let params = FilterParams { seed, ..FilterParams::default() };
        for kind in FilterKind::ALL {
            let report = run_filter(kind, &ds, &params).unwrap();
            let mut all: Vec<usize> = report.kept.iter().chain(&report.removed).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let kept = report.apply(&ds).unwrap();
            for (k, &i) in report.kept.iter().enumerate() {
                prop_assert_eq!(kept.instance(k), ds.instance(i));
            }
            prop_assert_eq!(&run_filter(kind, &ds, &params).unwrap(), &report);
        }
    }

    #[test]
    fn menn_removal_cuts_clash_pairs(seed in any::<u64>(), n in 4usize..50, c in 2usize..5) {
        let ds = random_dataset(&mut rng(seed), n, 2, c);
        let report = run_filter(FilterKind::Menn, &ds, &FilterParams::default()).unwrap();
        let counts = compute_report(&ds).clash_counts;
        if report.removed.iter().any(|&i| counts[i] > 0) {
            prop_assert!(clash_pair_count(&report.apply(&ds).unwrap()) < clash_pair_count(&ds));
        }
    }
}
