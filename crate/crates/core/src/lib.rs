//! Monotonic ordinal classification toolkit: dominance-aware datasets,
//! non-monotonicity metrics, optimal relabelling, label-noise injection,
//! monotone classifiers, monotonic noise filters and an evaluation harness.

pub mod classifiers;
pub mod dataset;
pub mod discretize;
pub mod error;
pub mod eval;
pub mod filters;
pub mod io;
pub mod metrics;
pub mod noise;
mod par;
pub mod relabel;
pub mod seed;
pub mod synth;

pub use dataset::{AttributeKind, AttributeMeta, Dominance, Instance, OrdinalDataset};
pub use error::{Error, Result};
