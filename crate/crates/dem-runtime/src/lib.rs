//! Detector error models: event keys, the model container, Monte-Carlo
//! sampling, exact small-model distributions and the text format.

mod dist;
mod key;
mod model;
mod sample;
mod text;

use thiserror::Error;

pub use dist::{exact_distribution, polarization, tvd, Distribution, MAX_DISTRIBUTION_BITS};
pub use key::{DemEventKey, DetectionHistory};
pub use model::DetectorErrorModel;
pub use sample::{sample, sample_packed};
pub use text::{parse_dem, serialize, HEADER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DemError {
    #[error("{kind} index {index} out of range (have {count})")]
    OutOfRange {
        kind: &'static str,
        index: usize,
        count: usize,
    },
    #[error("shape mismatch: expected {expected:?} detectors/observables, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("events must flip at least one detector or observable")]
    EmptyKey,
    #[error("invalid event probability {0}")]
    InvalidProbability(f64),
    #[error("cannot sample event {event} with probability {p}")]
    NegativeProbability { event: String, p: f64 },
    #[error("{bits} history bits exceeds the dense cap of {cap}")]
    TooLarge { bits: usize, cap: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}
