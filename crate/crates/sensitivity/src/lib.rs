//! Coherent-error sensitivity. Each physical H rate θ_i feeds circuit-level H
//! rates linearly, `φ_Q = s_Qᵀθ`, so detector expectations and leading-order
//! event probabilities are quadratic forms in θ.

mod matrix;
mod params;

use demforge_build::BuildError;
use demforge_errgen::ModelError;
use thiserror::Error;

pub use matrix::{
    detector_sensitivity, discard_sensitivity, event_sensitivity, SensitivityMatrix, SensitivityTarget,
};
pub use params::{circuit_rates, propagation_map, Granularity, Parameter, ParameterVector, PropagationMap, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("target {0} does not have ideal expectation +1")]
    InvalidTarget(String),
    #[error("event {0} is not a leading-order event of the parametrization")]
    UnknownEvent(String),
    #[error("target has {got} bits, circuit has {expected}")]
    Shape { expected: usize, got: usize },
    #[error("θ has {got} entries, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("per-location parameters have no gate-level model")]
    PerLocationModel,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Build(#[from] BuildError),
}
