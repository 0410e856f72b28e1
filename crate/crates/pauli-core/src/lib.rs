//! Signed Pauli algebra in the symplectic representation, Clifford
//! conjugation and stabilizer tableau simulation.

mod clifford;
mod pauli;
mod tableau;

pub use clifford::{conjugate, conjugate_sequence, CliffordOp, Gate};
pub use pauli::{Pauli, PauliError, PauliString};
pub use tableau::StabilizerTableau;
