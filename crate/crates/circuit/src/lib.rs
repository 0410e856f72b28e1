//! Circuit IR with mid-circuit measurements and detector annotations,
//! a text parser, built-in fixtures and the measurement-deferral transform.

mod expand;
pub mod fixtures;
mod ir;
mod parse;

pub use expand::{expand, ideal_final_state, ExpandError, ExpandedCircuit, NoiseSite, SiteKind};
pub use ir::{Circuit, Layer, OpKind, Operation};
pub use parse::{parse_circuit, ParseError};
