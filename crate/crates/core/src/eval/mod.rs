//! Stability, bootstrap confidence intervals, topic tracking and party
//! drift.

mod bootstrap;
mod stability;
pub mod synthetic;
mod topics;

use thiserror::Error;

use crate::detect::DetectError;
use crate::embed::EmbedError;

pub use bootstrap::{bootstrap_ci, quantile};
pub use stability::{
    intersection_at_k, run_stability, ChangeDetector, DetectorError, PipelineDetector, StabilityConfig,
    StabilityReport, StabilityRow, DEFAULT_K_LIST,
};
pub use topics::{party_drift, track_topics, PartyNeighbors, TopicReport, TopicRow, TrackConfig};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("list has {len} entries, fewer than k = {k}")]
    TooShort { len: usize, k: usize },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("{0:?} appears twice in a ranked list")]
    DuplicateEntry(String),
    #[error("bootstrap needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid evaluation configuration: {0}")]
    InvalidConfig(String),
    #[error("run with seed {seed} failed: {message}")]
    RunFailed { seed: u64, message: String },
    #[error("absent from every slice pair: {}", .0.join(", "))]
    Absent(Vec<String>),
    #[error("need at least 2 slices, got {0}")]
    TooFewSlices(usize),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}
