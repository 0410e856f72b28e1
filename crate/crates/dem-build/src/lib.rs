//! Detector error model construction: propagated generators are combined,
//! sorted into event classes, split into single-event channels, and each
//! channel's rate is read off a representative detector.

mod build;
mod classify;
mod compose;
mod events;
mod rate;
mod zassenhaus;

use demforge_dem::DemError;
use demforge_errgen::ModelError;
use thiserror::Error;

pub use build::{
    build_dem, build_dem_with_report, estimate_event_rate, representative, BuildConfig, BuildReport, NegativeRatePolicy,
};
pub use classify::{classify, delta, eeg_class, EventClassPartition};
pub use compose::composition_corrections;
pub use events::{cptp_nonnegativity_check, first_order_event_set, higher_order_event_set};
pub use rate::{beta, chi_expectation, composed_beta, estimate_rate, generator_beta, RateMode};
pub use zassenhaus::{zassenhaus_second, zassenhaus_split, zassenhaus_split_with};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dem(#[from] DemError),
    #[error("expansion order {0} is not supported (use 1 or 2)")]
    Order(usize),
    #[error("representative {0} is not a +1 stabilizer of the ideal state")]
    Representative(String),
    #[error("term {term} does not belong to event {event}")]
    MixedClass { event: String, term: String },
    #[error("negative event rates: {0:?}")]
    NegativeRates(Vec<(String, f64)>),
}
