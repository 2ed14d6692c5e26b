//! Reading and writing KEEL `.dat` and CSV files.
//!
//! Both readers first produce a [`RawTable`] whose target column is still a
//! list of raw tokens; it is turned into an [`OrdinalDataset`] either by
//! mapping the tokens onto an ordered class scale or by discretizing a
//! real-valued target.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, AttributeMeta, Instance, OrdinalDataset};
use crate::discretize;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Keel,
    Csv,
}

impl DataFormat {
    /// Guesses the format from the file extension (`.dat` is KEEL).
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("dat") => DataFormat::Keel,
            _ => DataFormat::Csv,
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "keel" | "dat" => Ok(DataFormat::Keel),
            "csv" => Ok(DataFormat::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

/// Options controlling how a file is read.
#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    /// Name of the class column; the last column (or KEEL `@outputs`) if unset.
    pub class_column: Option<String>,
}

/// A parsed file before the target has been mapped to class indices.
#[derive(Clone, Debug)]
pub struct RawTable {
    pub name: String,
    pub attributes: Vec<AttributeMeta>,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<String>,
    /// Declared class scale, when the file carries one.
    pub class_order: Option<Vec<String>>,
    /// Rows skipped because a value was missing.
    pub dropped_missing: usize,
}

impl RawTable {
    /// Maps target tokens onto the ordered class scale.
    pub fn into_classification(self) -> Result<OrdinalDataset> {
        if self.rows.is_empty() {
            return Err(Error::NoInstances);
        }
        let order = match self.class_order {
            Some(order) => order,
            None => infer_class_order(&self.targets),
        };
        let mut instances = Vec::with_capacity(self.rows.len());
        for (row, (x, t)) in self.rows.into_iter().zip(&self.targets).enumerate() {
            let label = order
                .iter()
                .position(|c| c == t || numeric_eq(c, t))
                .ok_or_else(|| Error::parse(row + 1, format!("unseen class label {t:?}")))?;
            instances.push(Instance::new(x, label));
        }
        OrdinalDataset::new(self.name, self.attributes, instances, order)
    }

    /// Replaces a real-valued target by equal-frequency bins.
    pub fn discretize_target(self, bins: usize) -> Result<OrdinalDataset> {
        let targets = self
            .targets
            .iter()
            .enumerate()
            .map(|(row, t)| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(row + 1, format!("non-numeric target {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        discretize::discretize_target(&self.name, self.attributes, self.rows, &targets, bins)
    }
}

fn numeric_eq(a: &str, b: &str) -> bool {
    match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Numeric tokens sort by value, anything else lexicographically.
fn infer_class_order(targets: &[String]) -> Vec<String> {
    let mut distinct: Vec<String> = Vec::new();
    for t in targets {
        if !distinct.iter().any(|d| d == t || numeric_eq(d, t)) {
            distinct.push(t.clone());
        }
    }
    let numeric: Option<Vec<f64>> = distinct.iter().map(|t| t.trim().parse::<f64>().ok()).collect();
    match numeric {
        Some(values) => {
            let mut pairs: Vec<(f64, String)> = values.into_iter().zip(distinct).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into_iter().map(|p| p.1).collect()
        }
        None => {
            distinct.sort();
            distinct
        }
    }
}

fn is_missing(token: &str) -> bool {
    let t = token.trim();
    t.is_empty() || t == "?" || t.eq_ignore_ascii_case("<null>") || t.eq_ignore_ascii_case("nan")
}

pub fn load_table(path: &Path, format: DataFormat, options: &LoadOptions) -> Result<RawTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    let mut table = match format {
        DataFormat::Keel => parse_keel(&text, options)?,
        DataFormat::Csv => parse_csv(&text, options)?,
    };
    if table.name.is_empty() {
        table.name = stem;
    }
    if table.dropped_missing > 0 {
        log::info!(
            "{}: dropped {} rows with missing values",
            path.display(),
            table.dropped_missing
        );
    }
    Ok(table)
}

/// Loads a classification dataset.
pub fn load_dataset(path: &Path, format: DataFormat) -> Result<OrdinalDataset> {
    load_table(path, format, &LoadOptions::default())?.into_classification()
}

pub fn load_dataset_with(path: &Path, format: DataFormat, options: &LoadOptions) -> Result<OrdinalDataset> {
    load_table(path, format, options)?.into_classification()
}

// ---------------------------------------------------------------------------
// KEEL

struct KeelAttribute {
    name: String,
    kind: KeelKind,
}

enum KeelKind {
    Numeric { integer: bool, range: Option<(f64, f64)> },
    Nominal(Vec<String>),
}

fn strip_quotes(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('\'')
        .and_then(|r| r.strip_suffix('\''))
        .or_else(|| s.strip_prefix('"').and_then(|r| r.strip_suffix('"')))
        .unwrap_or(s)
}

fn parse_keel_attribute(rest: &str, line: usize) -> Result<KeelAttribute> {
    let rest = rest.trim();
    let (name, spec) = if let Some(stripped) = rest.strip_prefix('\'') {
        let end = stripped
            .find('\'')
            .ok_or_else(|| Error::parse(line, "unterminated attribute name"))?;
        (stripped[..end].to_string(), stripped[end + 1..].trim())
    } else {
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '{')
            .ok_or_else(|| Error::parse(line, "attribute without type"))?;
        (rest[..end].to_string(), rest[end..].trim())
    };
    if let Some(list) = spec.strip_prefix('{') {
        let list = list
            .strip_suffix('}')
            .ok_or_else(|| Error::parse(line, "unterminated value list"))?;
        let values: Vec<String> = list.split(',').map(|v| strip_quotes(v).to_string()).collect();
        return Ok(KeelAttribute {
            name,
            kind: KeelKind::Nominal(values),
        });
    }
    let lower = spec.to_ascii_lowercase();
    let integer = lower.starts_with("integer");
    if !(integer || lower.starts_with("real") || lower.starts_with("numeric")) {
        return Err(Error::parse(line, format!("unsupported attribute type {spec:?}")));
    }
    let range = spec.find('[').and_then(|open| {
        let close = spec[open..].find(']')? + open;
        let mut parts = spec[open + 1..close].split(',');
        let lo = parts.next()?.trim().parse().ok()?;
        let hi = parts.next()?.trim().parse().ok()?;
        Some((lo, hi))
    });
    Ok(KeelAttribute {
        name,
        kind: KeelKind::Numeric { integer, range },
    })
}

fn name_list(rest: &str) -> Vec<String> {
    rest.split(',')
        .map(|s| strip_quotes(s).to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_keel(text: &str, options: &LoadOptions) -> Result<RawTable> {
    let mut relation = String::new();
    let mut attrs: Vec<KeelAttribute> = Vec::new();
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut data_start = None;

    let lines: Vec<&str> = text.lines().collect();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            relation = strip_quotes(&line[9..]).to_string();
        } else if lower.starts_with("@attribute") {
            attrs.push(parse_keel_attribute(&line[10..], i + 1)?);
        } else if lower.starts_with("@inputs") {
            inputs = Some(name_list(&line[7..]));
        } else if lower.starts_with("@input") {
            inputs = Some(name_list(&line[6..]));
        } else if lower.starts_with("@outputs") {
            outputs = Some(name_list(&line[8..]));
        } else if lower.starts_with("@output") {
            outputs = Some(name_list(&line[7..]));
        } else if lower.starts_with("@data") {
            data_start = Some(i + 1);
            break;
        } else {
            return Err(Error::parse(i + 1, format!("unexpected header line {line:?}")));
        }
    }
    let data_start = data_start.ok_or_else(|| Error::parse(lines.len(), "missing @data section"))?;
    if attrs.len() < 2 {
        return Err(Error::InvalidDataset("KEEL file needs at least 2 attributes".into()));
    }

    let position = |name: &str| attrs.iter().position(|a| a.name == name);
    let class_idx = match (&options.class_column, &outputs) {
        (Some(name), _) => position(name)
            .ok_or_else(|| Error::InvalidParameter(format!("no attribute named {name:?}")))?,
        (None, Some(outs)) if !outs.is_empty() => position(&outs[0])
            .ok_or_else(|| Error::InvalidDataset(format!("unknown output {:?}", outs[0])))?,
        _ => attrs.len() - 1,
    };
    let input_idx: Vec<usize> = match (&inputs, &options.class_column) {
        (Some(ins), None) => ins
            .iter()
            .map(|n| position(n).ok_or_else(|| Error::InvalidDataset(format!("unknown input {n:?}"))))
            .collect::<Result<_>>()?,
        _ => (0..attrs.len()).filter(|&j| j != class_idx).collect(),
    };

    let attributes: Vec<AttributeMeta> = input_idx
        .iter()
        .map(|&j| AttributeMeta {
            name: attrs[j].name.clone(),
            kind: match &attrs[j].kind {
                KeelKind::Numeric { integer: true, .. } => AttributeKind::Integer,
                KeelKind::Numeric { integer: false, .. } => AttributeKind::Real,
                KeelKind::Nominal(values) => AttributeKind::OrdinalCategorical {
                    values: values.clone(),
                },
            },
            observed_min: 0.0,
            observed_max: 0.0,
        })
        .collect();

    let class_order = match &attrs[class_idx].kind {
        KeelKind::Nominal(values) => Some(values.clone()),
        KeelKind::Numeric {
            integer: true,
            range: Some((lo, hi)),
        } if hi >= lo && hi - lo <= 1000.0 => {
            Some((*lo as i64..=*hi as i64).map(|v| v.to_string()).collect())
        }
        KeelKind::Numeric { .. } => None,
    };

    let mut rows = Vec::new();
    let mut targets = Vec::new();
    let mut dropped = 0;
    let mut data_row = 0;
    for raw in &lines[data_start..] {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        data_row += 1;
        let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
        if tokens.len() != attrs.len() {
            return Err(Error::parse(
                data_row,
                format!("expected {} values, found {}", attrs.len(), tokens.len()),
            ));
        }
        if tokens.iter().any(|t| is_missing(t)) {
            dropped += 1;
            continue;
        }
        let mut x = Vec::with_capacity(input_idx.len());
        for &j in &input_idx {
            let token = strip_quotes(tokens[j]);
            let value = match &attrs[j].kind {
                KeelKind::Numeric { .. } => token.parse::<f64>().map_err(|_| {
                    Error::parse(data_row, format!("non-numeric value {token:?} for {}", attrs[j].name))
                })?,
                KeelKind::Nominal(values) => values.iter().position(|v| v == token).ok_or_else(|| {
                    Error::parse(data_row, format!("undeclared value {token:?} for {}", attrs[j].name))
                })? as f64,
            };
            x.push(value);
        }
        rows.push(x);
        targets.push(strip_quotes(tokens[class_idx]).to_string());
    }
    if rows.is_empty() {
        return Err(Error::NoInstances);
    }
    Ok(RawTable {
        name: relation,
        attributes,
        rows,
        targets,
        class_order,
        dropped_missing: dropped,
    })
}

// ---------------------------------------------------------------------------
// CSV

fn parse_kind(token: &str) -> Option<AttributeKind> {
    match token.trim() {
        "real" => Some(AttributeKind::Real),
        "integer" => Some(AttributeKind::Integer),
        other => {
            let inner = other.strip_prefix("ordinal(")?.strip_suffix(')')?;
            Some(AttributeKind::OrdinalCategorical {
                values: inner.split('|').map(str::to_string).collect(),
            })
        }
    }
}

fn format_kind(kind: &AttributeKind) -> String {
    match kind {
        AttributeKind::OrdinalCategorical { values } => format!("ordinal({})", values.join("|")),
        other => other.tag().to_string(),
    }
}

fn parse_csv(text: &str, options: &LoadOptions) -> Result<RawTable> {
    let mut class_order = None;
    let mut kinds: Option<Vec<AttributeKind>> = None;
    let mut name = String::new();
    for line in text.lines().filter(|l| l.starts_with('#')) {
        let Some((key, value)) = line[1..].split_once('=') else {
            continue;
        };
        match key.trim() {
            "class_order" => class_order = Some(value.split(',').map(str::to_string).collect()),
            "attribute_kinds" => {
                kinds = value.split(',').map(parse_kind).collect::<Option<Vec<_>>>();
            }
            "relation" => name = value.to_string(),
            _ => {}
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse(0, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.len() < 2 {
        return Err(Error::InvalidDataset("CSV needs at least 2 columns".into()));
    }
    let class_idx = match &options.class_column {
        Some(c) => header
            .iter()
            .position(|h| h == c)
            .ok_or_else(|| Error::InvalidParameter(format!("no column named {c:?}")))?,
        None => header.len() - 1,
    };
    let input_idx: Vec<usize> = (0..header.len()).filter(|&j| j != class_idx).collect();
    let kinds = match kinds {
        Some(k) if k.len() == input_idx.len() => k,
        _ => vec![AttributeKind::Real; input_idx.len()],
    };

    let mut rows = Vec::new();
    let mut targets = Vec::new();
    let mut dropped = 0;
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| Error::parse(row, e.to_string()))?;
        if record.len() != header.len() {
            return Err(Error::parse(
                row,
                format!("expected {} values, found {}", header.len(), record.len()),
            ));
        }
        if record.iter().any(is_missing) {
            dropped += 1;
            continue;
        }
        let mut x = Vec::with_capacity(input_idx.len());
        for (k, &j) in input_idx.iter().enumerate() {
            let token = &record[j];
            let value = match &kinds[k] {
                AttributeKind::OrdinalCategorical { values } => {
                    match values.iter().position(|v| v == token) {
                        Some(p) => p as f64,
                        None => token.parse::<f64>().map_err(|_| {
                            Error::parse(row, format!("unknown value {token:?} for {}", header[j]))
                        })?,
                    }
                }
                _ => token.parse::<f64>().map_err(|_| {
                    Error::parse(row, format!("non-numeric value {token:?} for {}", header[j]))
                })?,
            };
            x.push(value);
        }
        rows.push(x);
        targets.push(record[class_idx].to_string());
    }
    if rows.is_empty() {
        return Err(Error::NoInstances);
    }
    let attributes = input_idx
        .iter()
        .zip(kinds)
        .map(|(&j, kind)| AttributeMeta {
            name: header[j].clone(),
            kind,
            observed_min: 0.0,
            observed_max: 0.0,
        })
        .collect();
    Ok(RawTable {
        name,
        attributes,
        rows,
        targets,
        class_order,
        dropped_missing: dropped,
    })
}

fn format_value(attr: &AttributeMeta, v: f64) -> String {
    match &attr.kind {
        AttributeKind::OrdinalCategorical { values } if v.fract() == 0.0 && v >= 0.0 => values
            .get(v as usize)
            .cloned()
            .unwrap_or_else(|| v.to_string()),
        _ => v.to_string(),
    }
}

/// Canonical CSV: header, rows, then a trailing `#key=value` block.
pub fn to_canonical_csv(ds: &OrdinalDataset, source: &str) -> String {
    let mut out = String::new();
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let class_header = if ds.attributes().iter().any(|a| a.name == "class") {
        "__class__"
    } else {
        "class"
    };
    let mut header: Vec<&str> = ds.attributes().iter().map(|a| a.name.as_str()).collect();
    header.push(class_header);
    writer.write_record(&header).expect("in-memory write");
    for inst in ds.instances() {
        let mut record: Vec<String> = ds
            .attributes()
            .iter()
            .zip(&inst.features)
            .map(|(a, &v)| format_value(a, v))
            .collect();
        record.push(ds.class_names()[inst.label].clone());
        writer.write_record(&record).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf8"));
    let _ = writeln!(out, "#relation={}", ds.name);
    let _ = writeln!(out, "#class_order={}", ds.class_names().join(","));
    let kinds: Vec<String> = ds.attributes().iter().map(|a| format_kind(&a.kind)).collect();
    let _ = writeln!(out, "#attribute_kinds={}", kinds.join(","));
    let _ = writeln!(out, "#source={source}");
    out
}

pub fn to_keel(ds: &OrdinalDataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", ds.name.replace(char::is_whitespace, "_"));
    for a in ds.attributes() {
        match &a.kind {
            AttributeKind::OrdinalCategorical { values } => {
                let _ = writeln!(out, "@attribute {} {{{}}}", a.name, values.join(","));
            }
            kind => {
                let _ = writeln!(
                    out,
                    "@attribute {} {} [{}, {}]",
                    a.name,
                    kind.tag(),
                    a.observed_min,
                    a.observed_max
                );
            }
        }
    }
    let _ = writeln!(out, "@attribute Class {{{}}}", ds.class_names().join(","));
    let inputs: Vec<&str> = ds.attributes().iter().map(|a| a.name.as_str()).collect();
    let _ = writeln!(out, "@inputs {}", inputs.join(", "));
    let _ = writeln!(out, "@outputs Class");
    let _ = writeln!(out, "@data");
    for inst in ds.instances() {
        let mut fields: Vec<String> = ds
            .attributes()
            .iter()
            .zip(&inst.features)
            .map(|(a, &v)| format_value(a, v))
            .collect();
        fields.push(ds.class_names()[inst.label].clone());
        let _ = writeln!(out, "{}", fields.join(", "));
    }
    out
}

pub fn save_dataset(ds: &OrdinalDataset, path: &Path, format: DataFormat, source: &str) -> Result<()> {
    let text = match format {
        DataFormat::Csv => to_canonical_csv(ds, source),
        DataFormat::Keel => to_keel(ds),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
