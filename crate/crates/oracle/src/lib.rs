//! Exact references for small systems: dense channels, density-matrix
//! simulation of expanded circuits, the Pauli-twirl baseline and DEM
//! estimation from a history distribution.

mod dense;
mod estimate;
mod sim;
mod superop;
mod twirl;

use demforge_dem::DemError;
use demforge_errgen::ModelError;
use thiserror::Error;

pub use dense::{pauli_from_index, pauli_index, pauli_matrix};
pub use estimate::{estimate_dem_from_distribution, EVENT_FLOOR};
pub use sim::{
    dense_history_distribution, distribution_after_generator, exact_history_distribution, pauli_frame_distribution,
    MAX_STATE_QUBITS,
};
pub use superop::{dense_exp, generator_ptm, local_generator, DenseSuperoperator, MAX_CHANNEL_QUBITS};
pub use twirl::{pauli_twirl, stochastic_dem, twirl_generator, twirled_dem, PauliChannel, TwirledGate, TwirledModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{what} acts on {qubits} qubits, the dense limit is {cap}")]
    TooManyQubits { what: &'static str, qubits: usize, cap: usize },
    #[error("polarization of {subset:#x} is {value}, cannot take its logarithm")]
    NonPositivePolarization { subset: u64, value: f64 },
    #[error("twirled channel has Pauli fidelity {value} for {pauli}")]
    NonPositiveFidelity { pauli: String, value: f64 },
    #[error("site {site} does not carry a Pauli channel")]
    NotPauli { site: usize },
    #[error("{0} is not a Z-type observable")]
    NotZType(String),
    #[error("model has non-stochastic term {0}")]
    NotStochastic(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dem(#[from] DemError),
}
