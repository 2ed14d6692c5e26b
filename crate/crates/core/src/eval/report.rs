//! Record CSV, per-configuration rank tables and the Markdown summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{friedman_holm, Direction, RankTable};
use super::{ExperimentRecord, FilterAudit};
use crate::classifiers::ClassifierKind;
use crate::error::{Error, Result};
use crate::metrics::MonotonicitySummary;

const HEADER: [&str; 16] = [
    "dataset",
    "noise_level",
    "noise_seed",
    "preprocessing",
    "classifier",
    "fold",
    "accuracy",
    "mae",
    "nmi1",
    "nmi2",
    "noncomparable",
    "size",
    "noisy_removed",
    "noisy_kept",
    "clean_removed",
    "clean_kept",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).map_err(csv_err)?;
    for r in records {
        let m = &r.train_monotonicity;
        let audit = r.filter_audit.map_or([String::new(), String::new(), String::new(), String::new()], |a| {
            [
                a.noisy_removed.to_string(),
                a.noisy_kept.to_string(),
                a.clean_removed.to_string(),
                a.clean_kept.to_string(),
            ]
        });
        let mut row = vec![
            r.dataset.clone(),
            r.noise_level.to_string(),
            r.noise_seed.to_string(),
            r.preprocessing.to_string(),
            r.classifier.to_string(),
            r.fold.to_string(),
            r.accuracy.to_string(),
            r.mae.to_string(),
            m.nmi1.to_string(),
            m.nmi2.to_string(),
            m.noncomparable.to_string(),
            m.size.to_string(),
        ];
        row.extend(audit);
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn read_records_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::parse(1, "unexpected record header"));
    }
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = row + 2;
        let field = |i: usize| rec.get(i).unwrap_or("");
        fn num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
            s.parse().map_err(|_| Error::parse(line, format!("bad {what}: {s:?}")))
        }
        let audit = if field(12).is_empty() {
            None
        } else {
            Some(FilterAudit {
                noisy_removed: num(field(12), line, "noisy_removed")?,
                noisy_kept: num(field(13), line, "noisy_kept")?,
                clean_removed: num(field(14), line, "clean_removed")?,
                clean_kept: num(field(15), line, "clean_kept")?,
            })
        };
        out.push(ExperimentRecord {
            dataset: field(0).to_string(),
            noise_level: num(field(1), line, "noise_level")?,
            noise_seed: num(field(2), line, "noise_seed")?,
            preprocessing: field(3).parse().map_err(|_| Error::parse(line, "bad preprocessing"))?,
            classifier: field(4).parse().map_err(|_| Error::parse(line, "bad classifier"))?,
            fold: num(field(5), line, "fold")?,
            accuracy: num(field(6), line, "accuracy")?,
            mae: num(field(7), line, "mae")?,
            train_monotonicity: MonotonicitySummary {
                nmi1: num(field(8), line, "nmi1")?,
                nmi2: num(field(9), line, "nmi2")?,
                noncomparable: num(field(10), line, "noncomparable")?,
                size: num(field(11), line, "size")?,
            },
            filter_audit: audit,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Accuracy,
    Mae,
}

impl Metric {
    pub fn of(self, r: &ExperimentRecord) -> f64 {
        match self {
            Metric::Accuracy => r.accuracy,
            Metric::Mae => r.mae,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Metric::Accuracy => Direction::HigherBetter,
            Metric::Mae => Direction::LowerBetter,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Mae => "mae",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankKey {
    pub classifier: ClassifierKind,
    pub metric: Metric,
    pub noise_level: f64,
}

/// Values in order of first appearance.
fn distinct<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Mean of `value` over the records matching `keep`.
fn mean_where(records: &[ExperimentRecord], keep: impl Fn(&ExperimentRecord) -> bool, value: impl Fn(&ExperimentRecord) -> f64) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for r in records.iter().filter(|r| keep(r)) {
        sum += value(r);
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// One Friedman/Holm table per (classifier, metric, noise level): datasets
/// are the blocks (mean over seeds and folds), preprocessings the algorithms.
/// Configurations with fewer than two datasets or preprocessings are skipped.
pub fn rank_tables(records: &[ExperimentRecord]) -> Result<Vec<(RankKey, RankTable)>> {
    let datasets = distinct(records.iter().map(|r| r.dataset.clone()));
    let levels = distinct(records.iter().map(|r| r.noise_level));
    let preps = distinct(records.iter().map(|r| r.preprocessing));
    let classifiers = distinct(records.iter().map(|r| r.classifier));
    let mut out = Vec::new();
    if datasets.len() < 2 || preps.len() < 2 {
        return Ok(out);
    }
    let names: Vec<String> = preps.iter().map(|p| p.to_string()).collect();
    for &classifier in &classifiers {
        for metric in [Metric::Accuracy, Metric::Mae] {
            for &level in &levels {
                let mut matrix = Vec::new();
                for d in &datasets {
                    let row: Option<Vec<f64>> = preps
                        .iter()
                        .map(|&p| {
                            mean_where(
                                records,
                                |r| r.classifier == classifier && r.noise_level == level && &r.dataset == d && r.preprocessing == p,
                                |r| metric.of(r),
                            )
                        })
                        .collect();
                    if let Some(row) = row {
                        matrix.push(row);
                    }
                }
                if matrix.len() < 2 {
                    continue;
                }
                let table = friedman_holm(&matrix, &names, metric.direction())?;
                out.push((
                    RankKey {
                        classifier,
                        metric,
                        noise_level: level,
                    },
                    table,
                ));
            }
        }
    }
    Ok(out)
}

fn pct(level: f64) -> String {
    format!("{}%", (level * 100.0).round())
}

/// Markdown report: mean accuracy and MAE per preprocessing and noise level
/// for every classifier (mean over datasets, seeds and folds), Holm markers
/// against the best-ranked preprocessing, and the training-set monotonicity
/// of every preprocessing.
pub fn markdown_summary(records: &[ExperimentRecord], tables: &[(RankKey, RankTable)]) -> String {
    let levels = distinct(records.iter().map(|r| r.noise_level));
    let preps = distinct(records.iter().map(|r| r.preprocessing));
    let classifiers = distinct(records.iter().map(|r| r.classifier));
    let datasets = distinct(records.iter().map(|r| r.dataset.clone()));
    let mut s = String::new();
    let _ = writeln!(s, "# Experiment summary\n");
    let _ = writeln!(
        s,
        "{} records over datasets: {}.\n\nCells are means over datasets, seeds and folds. \
         `*` marks Holm p < 0.05 and `+` p < 0.10 against the best-ranked method (`(c)`).\n",
        records.len(),
        datasets.join(", ")
    );
    for metric in [Metric::Accuracy, Metric::Mae] {
        let _ = writeln!(s, "## Average {}\n", metric.name());
        for &classifier in &classifiers {
            let _ = writeln!(s, "### {classifier}\n");
            let _ = write!(s, "| Method |");
            for &l in &levels {
                let _ = write!(s, " {} |", pct(l));
            }
            let _ = writeln!(s);
            let _ = writeln!(s, "|---|{}", "---|".repeat(levels.len()));
            for &p in &preps {
                let _ = write!(s, "| {p} |");
                for &l in &levels {
                    let value = mean_where(
                        records,
                        |r| r.classifier == classifier && r.noise_level == l && r.preprocessing == p,
                        |r| metric.of(r),
                    );
                    let marker = tables
                        .iter()
                        .find(|(k, _)| k.classifier == classifier && k.metric == metric && k.noise_level == l)
                        .map_or("", |(_, t)| {
                            let name = p.to_string();
                            if t.algorithms[t.control] == name {
                                " (c)"
                            } else {
                                match t.comparisons.iter().find(|c| c.algorithm == name) {
                                    Some(c) if c.significant_05 => " *",
                                    Some(c) if c.significant_10 => " +",
                                    _ => "",
                                }
                            }
                        });
                    match value {
                        Some(v) => {
                            let _ = write!(s, " {v:.2}{marker} |");
                        }
                        None => {
                            let _ = write!(s, " - |");
                        }
                    }
                }
                let _ = writeln!(s);
            }
            let _ = writeln!(s);
        }
    }
    let _ = writeln!(s, "## Average monotonicity of the training sets\n");
    for &l in &levels {
        let _ = writeln!(s, "### Noise {}\n", pct(l));
        let _ = writeln!(s, "| Method | NMI1 | NMI2 | Non-comparable | Size |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        for &p in &preps {
            let keep = |r: &ExperimentRecord| r.noise_level == l && r.preprocessing == p;
            let get = |f: fn(&MonotonicitySummary) -> f64| mean_where(records, keep, |r| f(&r.train_monotonicity)).unwrap_or(f64::NAN);
            let _ = writeln!(
                s,
                "| {p} | {:.4} | {:.4} | {:.0} | {:.1} |",
                get(|m| m.nmi1),
                get(|m| m.nmi2),
                get(|m| m.noncomparable as f64),
                get(|m| m.size as f64)
            );
        }
        let _ = writeln!(s);
    }
    s
}

/// Writes `records.csv`, `summary.md` and `ranks/<classifier>_<metric>_<level>.json`.
pub fn write_outputs(records: &[ExperimentRecord], dir: &Path) -> Result<()> {
    let ranks_dir = dir.join("ranks");
    fs::create_dir_all(&ranks_dir).map_err(|e| Error::io(&ranks_dir, e))?;
    let csv_path = dir.join("records.csv");
    fs::write(&csv_path, records_to_csv(records)?).map_err(|e| Error::io(&csv_path, e))?;
    let tables = rank_tables(records)?;
    for (key, table) in &tables {
        let path = ranks_dir.join(format!("{}_{}_{}.json", key.classifier, key.metric.name(), key.noise_level));
        let json = serde_json::to_string_pretty(&BTreeMap::from([
            ("key", serde_json::to_value(key)?),
            ("table", serde_json::to_value(table)?),
        ]))?;
        fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    }
    let md_path = dir.join("summary.md");
    fs::write(&md_path, markdown_summary(records, &tables)).map_err(|e| Error::io(&md_path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Preprocessing;

    fn record(dataset: &str, p: Preprocessing, acc: f64, audit: bool) -> ExperimentRecord {
        ExperimentRecord {
            dataset: dataset.into(),
            noise_level: 0.1,
            noise_seed: 3,
            preprocessing: p,
            classifier: ClassifierKind::Mid,
            fold: 0,
            accuracy: acc,
            mae: 1.0 - acc,
            train_monotonicity: MonotonicitySummary {
                nmi1: 0.01,
                nmi2: 0.2,
                noncomparable: 17,
                size: 90,
            },
            filter_audit: audit.then_some(FilterAudit {
                noisy_removed: 1,
                noisy_kept: 2,
                clean_removed: 3,
                clean_kept: 84,
            }),
        }
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![record("a", Preprocessing::None, 0.5, false), record("b", Preprocessing::Relabel, 0.1 + 0.2, true)];
        let text = records_to_csv(&recs).unwrap();
        assert_eq!(read_records_csv(&text).unwrap(), recs);
        assert!(read_records_csv("x,y\n1,2\n").is_err());
    }

    #[test]
    fn ranks_and_summary() {
        let mut recs = Vec::new();
        for (d, a, b) in [("a", 0.8, 0.7), ("b", 0.6, 0.5), ("c", 0.9, 0.85)] {
            recs.push(record(d, Preprocessing::None, b, true));
            recs.push(record(d, Preprocessing::Relabel, a, true));
        }
        let tables = rank_tables(&recs).unwrap();
        assert_eq!(tables.len(), 2);
        let (_, acc) = &tables[0];
        assert_eq!(acc.mean_ranks, vec![2.0, 1.0]);
        let md = markdown_summary(&recs, &tables);
        assert!(md.contains("| relabel | 0.77 (c) |"), "{md}");
        assert!(md.contains("| none | 0.0100 | 0.2000 | 17 | 90.0 |"));
    }
}
