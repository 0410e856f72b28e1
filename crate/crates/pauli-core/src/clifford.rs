use std::fmt;

use crate::pauli::{PauliError, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    H,
    S,
    SDag,
    X,
    Y,
    Z,
    CX,
    CZ,
    Swap,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::CX | Gate::CZ | Gate::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::S => "S",
            Gate::SDag => "S_DAG",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::CX => "CX",
            Gate::CZ => "CZ",
            Gate::Swap => "SWAP",
        }
    }

    pub fn from_name(s: &str) -> Option<Gate> {
        Some(match s {
            "H" => Gate::H,
            "S" => Gate::S,
            "S_DAG" | "SDG" => Gate::SDag,
            "X" => Gate::X,
            "Y" => Gate::Y,
            "Z" => Gate::Z,
            "CX" | "CNOT" => Gate::CX,
            "CZ" => Gate::CZ,
            "SWAP" => Gate::Swap,
            _ => return None,
        })
    }

    pub const ALL: [Gate; 9] = [
        Gate::H,
        Gate::S,
        Gate::SDag,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::CX,
        Gate::CZ,
        Gate::Swap,
    ];
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CliffordOp {
    gate: Gate,
    targets: [usize; 2],
}

impl CliffordOp {
    pub fn new(gate: Gate, targets: &[usize]) -> Result<Self, PauliError> {
        if targets.len() != gate.arity() {
            return Err(PauliError::Arity {
                gate: gate.name(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(PauliError::RepeatedTarget(targets[0]));
        }
        let mut t = [targets[0], 0];
        if targets.len() == 2 {
            t[1] = targets[1];
        }
        Ok(CliffordOp { gate, targets: t })
    }

    pub fn gate(&self) -> Gate {
        self.gate
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets[..self.gate.arity()]
    }

    pub fn max_target(&self) -> usize {
        self.targets().iter().copied().max().unwrap_or(0)
    }

    /// Replaces `p` with `U p U†`.
    pub fn conjugate_in_place(&self, p: &mut PauliString) -> Result<(), PauliError> {
        let n = p.num_qubits();
        if let Some(&q) = self.targets().iter().find(|&&q| q >= n) {
            return Err(PauliError::QubitOutOfRange {
                qubit: q,
                num_qubits: n,
            });
        }
        self.apply_unchecked(p);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, p: &mut PauliString) {
        let [a, b] = self.targets;
        let flip = match self.gate {
            Gate::H => h(p, a),
            Gate::S => {
                let (x, z) = (p.x_bit(a), p.z_bit(a));
                p.set_bits(a, x, z ^ x);
                x & z
            }
            Gate::SDag => {
                let (x, z) = (p.x_bit(a), p.z_bit(a));
                p.set_bits(a, x, z ^ x);
                x & !z
            }
            Gate::X => p.z_bit(a),
            Gate::Y => p.x_bit(a) ^ p.z_bit(a),
            Gate::Z => p.x_bit(a),
            Gate::CX => cx(p, a, b),
            Gate::CZ => {
                let mut f = h(p, b);
                f ^= cx(p, a, b);
                f ^= h(p, b);
                f
            }
            Gate::Swap => {
                let (xa, za, xb, zb) = (p.x_bit(a), p.z_bit(a), p.x_bit(b), p.z_bit(b));
                p.set_bits(a, xb, zb);
                p.set_bits(b, xa, za);
                false
            }
        };
        if flip {
            p.negate();
        }
    }
}

fn h(p: &mut PauliString, a: usize) -> bool {
    let (x, z) = (p.x_bit(a), p.z_bit(a));
    p.set_bits(a, z, x);
    x & z
}

fn cx(p: &mut PauliString, c: usize, t: usize) -> bool {
    let (xc, zc, xt, zt) = (p.x_bit(c), p.z_bit(c), p.x_bit(t), p.z_bit(t));
    p.set_bits(t, xt ^ xc, zt);
    p.set_bits(c, xc, zc ^ zt);
    xc & zt & !(xt ^ zc)
}

impl fmt::Display for CliffordOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gate)?;
        for t in self.targets() {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// `U p U†` for a single op.
pub fn conjugate(op: &CliffordOp, p: &PauliString) -> Result<PauliString, PauliError> {
    let mut out = p.clone();
    op.conjugate_in_place(&mut out)?;
    Ok(out)
}

/// Conjugation by the circuit that applies `ops[0]` first.
pub fn conjugate_sequence(ops: &[CliffordOp], p: &PauliString) -> Result<PauliString, PauliError> {
    let mut out = p.clone();
    for op in ops {
        op.conjugate_in_place(&mut out)?;
    }
    Ok(out)
}
