//! Elementary error generators (EEGs) and the algebra needed to turn gate-level
//! noise into a circuit-level error generator.

mod bch;
mod chi;
mod eeg;
mod generator;
mod model;
mod propagate;
mod random;

pub use bch::{bch_combine, bch_combine_graded, GradedGenerator, UnsupportedOrder};
pub use chi::{commutator, commutator_generators, compose, compose_generators, Chi};
pub use eeg::{Eeg, EegError, Sector};
pub use generator::{SparseGenerator, CANCELLATION_TOLERANCE};
pub use model::{flip_rate, ErrorModel, GateNoise, ModelError, UnboundPolicy};
pub use propagate::{propagate_eeg, propagate_model, site_generator, PropagatedGenerator};
pub use random::{sample_random_cptp_model, GateNoiseSpec, RandomModelSpec};
