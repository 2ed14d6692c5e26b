use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use log::info;
use monofilter::classifiers::{Classifier, ClassifierKind, ClassifierParams, Model};
use monofilter::discretize::monotone_feature_count;
use monofilter::eval::{self, accuracy, mae, ExperimentConfig};
use monofilter::filters::{run_filter, FilterKind, FilterParams};
use monofilter::io::{self, DataFormat, LoadOptions};
use monofilter::metrics::compute_report;
use monofilter::noise::{inject_noise, NoiseMask};
use monofilter::relabel::relabel;
use monofilter::{synth, OrdinalDataset};

const DEFAULTS: &str = "\
Defaults (per method):
  MENN     k = 3
  MRNGE    firstOrderEdition = true
  MIPF     numberPartitions = 5, consensus filter
           confidence = 0.25, 2 items per leaf
  MINFFC   numberPartitions = 3,  majority filter
           k = 3, threshold= 0
           confidence = 0.25, 2 items per leaf
  MkNN     k = 3, distance = euclidean
  OLM      modeResolution = conservative
           modeClassification = conservative
  OSDL     classificationType = media, balanced = No
           weighted = No, tuneInterpolationParameter = No,
           lowerBound = 0, upperBound = 1
           interpolationParameter = 0.5, interpolationStepSize = 10
  MID      confidence = 0.25, 2 items per leaf, R = 1
Not fixed by the methods themselves: MIPF p = 0.01, y-good = ceil(0.01 n), g = 1;
MINFFC p = 0.01, g = 3.

Exit status: 0 success, 1 usage error, 2 data error.";

#[derive(Parser)]
#[command(name = "monofilter", version, about = "Monotonic ordinal classification: noise filters, relabelling, classifiers and experiments", after_help = DEFAULTS)]
struct Cli {
    /// More log output on standard error (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Dataset file (CSV or KEEL .dat).
    input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// Name of the class column (CSV); the last column by default.
    #[arg(long)]
    class_column: Option<String>,
    /// Discretize a numeric target into this many equal-frequency classes.
    #[arg(long)]
    bins: Option<usize>,
}

impl Input {
    fn load(&self) -> anyhow::Result<OrdinalDataset> {
        load(&self.input, self.format.as_deref(), self.class_column.clone(), self.bins)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print size and monotonicity metrics of a dataset as CSV.
    Inspect {
        #[command(flatten)]
        input: Input,
        /// |Spearman rho| above which a feature counts as monotone.
        #[arg(long, default_value_t = 0.1)]
        rmi_threshold: f64,
        /// Print JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Flip a fraction of labels to an adjacent class (cyclic).
    Inject {
        #[command(flatten)]
        input: Input,
        output: PathBuf,
        /// Fraction of labels to corrupt.
        #[arg(long)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mask file; `<output>.mask.json` by default.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Relabel the minimum number of instances to make the data monotone.
    Relabel {
        #[command(flatten)]
        input: Input,
        output: PathBuf,
        /// Change log; `<output>.relabel.json` by default.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run a monotonic noise filter and write the kept instances.
    Filter {
        #[command(flatten)]
        input: Input,
        output: PathBuf,
        #[arg(long)]
        method: FilterKind,
        /// MENN / MINFFC neighbourhood size.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Number of partitions; 5 for MIPF, 3 for MINFFC when omitted.
        #[arg(long)]
        partitions: Option<usize>,
        /// Minimum share of noisy instances to keep iterating.
        #[arg(long, default_value_t = 0.01)]
        p: f64,
        /// MIPF good instances set aside per iteration.
        #[arg(long)]
        y_good: Option<usize>,
        /// Consecutive quiet iterations before stopping; 1 for MIPF, 3 for MINFFC when omitted.
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Filter report; `<output>.report.json` by default.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Noise mask from `inject`, to add removal precision/recall to the report.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Fit a classifier and save it as JSON.
    Train {
        #[command(flatten)]
        input: Input,
        model: PathBuf,
        #[arg(long)]
        classifier: ClassifierKind,
        /// Neighbourhood size for mknn / knn.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// MID order-ambiguity weight R.
        #[arg(long, default_value_t = 1.0)]
        ambiguity_weight: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Predict a dataset with a saved model; writes `index,prediction,label` CSV.
    Predict {
        model: PathBuf,
        #[command(flatten)]
        input: Input,
        /// Output CSV; standard output by default.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a cross-validation experiment described by a TOML file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Friedman/Holm tables and summary from a records CSV.
    Stats {
        records: PathBuf,
        /// Write ranks/*.json and summary.md here instead of printing JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a bundled synthetic benchmark (era, esl, lev, swd) or `demo`.
    Generate {
        name: String,
        output: PathBuf,
        /// Seed for `demo`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load(path: &Path, format: Option<&str>, class_column: Option<String>, bins: Option<usize>) -> anyhow::Result<OrdinalDataset> {
    let format = match format {
        Some(f) => f.parse::<DataFormat>()?,
        None => DataFormat::from_path(path),
    };
    let opts = LoadOptions { class_column };
    let table = io::load_table(path, format, &opts)?;
    let ds = match bins {
        Some(b) => table.discretize_target(b)?,
        None => table.into_classification()?,
    };
    info!("loaded {}: {} instances, {} features, {} classes", path.display(), ds.len(), ds.feature_count(), ds.class_count());
    Ok(ds)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn save(ds: &OrdinalDataset, path: &Path, source: &str) -> anyhow::Result<()> {
    io::save_dataset(ds, path, DataFormat::from_path(path), source)
        .with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Inspect { input, rmi_threshold, json } => {
            let ds = input.load()?;
            let r = compute_report(&ds);
            let features = monotone_feature_count(&ds, rmi_threshold);
            if json {
                let value = serde_json::json!({
                    "n": ds.len(),
                    "features": ds.feature_count(),
                    "classes": ds.class_count(),
                    "nmi1": r.nmi1,
                    "nmi2": r.nmi2,
                    "noncomparable": r.non_comparable_pairs,
                    "clash_pairs": r.clash_pairs(),
                    "monotone_features": features,
                });
                println!("{}", serde_json::to_string_pretty(&value).map_err(anyhow::Error::from)?);
            } else {
                println!("n,features,classes,nmi1,nmi2,noncomparable,clash_pairs,monotone_features");
                println!(
                    "{},{},{},{},{},{},{},{}",
                    ds.len(),
                    ds.feature_count(),
                    ds.class_count(),
                    r.nmi1,
                    r.nmi2,
                    r.non_comparable_pairs,
                    r.clash_pairs(),
                    features
                );
            }
        }
        Command::Inject { input, output, noise, seed, mask } => {
            if !(0.0..=1.0).contains(&noise) {
                return Err(usage("--noise must lie in [0, 1]"));
            }
            let ds = input.load()?;
            let (noisy, m) = inject_noise(&ds, noise, seed).map_err(anyhow::Error::from)?;
            save(&noisy, &output, &format!("inject noise={noise} seed={seed}"))?;
            let mask_path = mask.unwrap_or_else(|| sibling(&output, ".mask.json"));
            io::write_json(&m, &mask_path).map_err(anyhow::Error::from)?;
            info!("corrupted {} of {} labels", m.corrupted_indices.len(), ds.len());
        }
        Command::Relabel { input, output, log } => {
            let ds = input.load()?;
            let result = relabel(&ds).map_err(anyhow::Error::from)?;
            save(&result.dataset, &output, "relabel")?;
            let log_path = log.unwrap_or_else(|| sibling(&output, ".relabel.json"));
            let summary = serde_json::json!({
                "changes": result.changes,
                "changed_indices": result.changed_indices,
                "log": result.log,
                "clamped": result.clamped,
            });
            io::write_json(&summary, &log_path).map_err(anyhow::Error::from)?;
            info!("relabelled {} of {} instances", result.changes, ds.len());
        }
        Command::Filter {
            input,
            output,
            method,
            k,
            partitions,
            p,
            y_good,
            g,
            seed,
            report,
            mask,
        } => {
            if k == 0 {
                return Err(usage("--k must be at least 1"));
            }
            if partitions.is_some_and(|v| v < 2) {
                return Err(usage("--partitions must be at least 2"));
            }
            let mut params = FilterParams {
                menn_k: k,
                seed,
                ..FilterParams::default()
            };
            params.mipf.p = p;
            params.mipf.y_good = y_good;
            params.minffc.p = p;
            params.minffc.k = k;
            if let Some(v) = partitions {
                params.mipf.partitions = v;
                params.minffc.partitions = v;
            }
            if let Some(v) = g {
                params.mipf.g = v;
                params.minffc.g = v;
            }
            let ds = input.load()?;
            let rep = run_filter(method, &ds, &params).map_err(anyhow::Error::from)?;
            let kept = rep.apply(&ds).map_err(anyhow::Error::from)?;
            save(&kept, &output, &format!("filter {method}"))?;
            let mut value = serde_json::to_value(&rep).map_err(anyhow::Error::from)?;
            if let Some(mask_path) = mask {
                let m: NoiseMask = io::read_json(&mask_path).map_err(anyhow::Error::from)?;
                let audit = eval::filter_decision_stats(&rep, &m);
                value["audit"] = serde_json::json!({
                    "counts": audit,
                    "percentages": audit.percentages(),
                    "precision": audit.precision(),
                    "recall": audit.recall(),
                });
            }
            let report_path = report.unwrap_or_else(|| sibling(&output, ".report.json"));
            io::write_json(&value, &report_path).map_err(anyhow::Error::from)?;
            info!("{method}: kept {} of {}", rep.kept.len(), ds.len());
        }
        Command::Train {
            input,
            model,
            classifier,
            k,
            ambiguity_weight,
            seed,
        } => {
            if k == 0 {
                return Err(usage("--k must be at least 1"));
            }
            let mut params = ClassifierParams {
                mknn_k: k,
                knn_k: k,
                seed,
                ..ClassifierParams::default()
            };
            params.mid.ambiguity_weight = ambiguity_weight;
            let ds = input.load()?;
            let fitted = Model::fit(classifier, &ds, &params).map_err(anyhow::Error::from)?;
            let train_acc = accuracy(&fitted.predict_dataset(&ds), &ds.labels()).map_err(anyhow::Error::from)?;
            std::fs::write(&model, fitted.to_json().map_err(anyhow::Error::from)?)
                .with_context(|| format!("writing {}", model.display()))?;
            info!("{classifier}: training accuracy {train_acc:.4}");
        }
        Command::Predict { model, input, output } => {
            let text = std::fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let fitted = Model::from_json(&text).map_err(anyhow::Error::from)?;
            let ds = input.load()?;
            let preds = fitted.predict_checked(&ds).map_err(anyhow::Error::from)?;
            let mut csv = String::from("index,prediction,label\n");
            for (i, (&p, x)) in preds.iter().zip(ds.instances()).enumerate() {
                csv.push_str(&format!("{i},{},{}\n", ds.class_names()[p], ds.class_names()[x.label]));
            }
            match output {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            let truths = ds.labels();
            info!(
                "accuracy {:.4}, mae {:.4}",
                accuracy(&preds, &truths).map_err(anyhow::Error::from)?,
                mae(&preds, &truths).map_err(anyhow::Error::from)?
            );
        }
        Command::Experiment { config, output, workers } => {
            let mut cfg = ExperimentConfig::load(&config).map_err(|e| usage(e.to_string()))?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let base = config.parent().map(Path::to_path_buf);
            let out_dir = output
                .or_else(|| cfg.output_dir.clone().map(|d| base.clone().unwrap_or_default().join(d)))
                .unwrap_or_else(|| PathBuf::from("results"));
            let records = eval::run_experiment(&cfg, base.as_deref()).map_err(anyhow::Error::from)?;
            eval::write_outputs(&records, &out_dir).map_err(anyhow::Error::from)?;
            info!("{} records written to {}", records.len(), out_dir.display());
        }
        Command::Stats { records, output } => {
            let text = std::fs::read_to_string(&records).with_context(|| format!("reading {}", records.display()))?;
            let recs = eval::read_records_csv(&text).map_err(anyhow::Error::from)?;
            match output {
                Some(dir) => eval::write_outputs(&recs, &dir).map_err(anyhow::Error::from)?,
                None => {
                    let tables = eval::rank_tables(&recs).map_err(anyhow::Error::from)?;
                    let value: Vec<_> = tables
                        .iter()
                        .map(|(k, t)| serde_json::json!({ "key": k, "table": t }))
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&value).map_err(anyhow::Error::from)?);
                }
            }
        }
        Command::Generate { name, output, seed } => {
            let ds = if name == "demo" {
                synth::demo_2d(300, 3, 0.08, seed)
            } else {
                synth::benchmark(&name)
            }
            .map_err(|e| usage(e.to_string()))?;
            save(&ds, &output, &format!("synthetic {name}"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
