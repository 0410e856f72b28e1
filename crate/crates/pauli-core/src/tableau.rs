use crate::clifford::CliffordOp;
use crate::pauli::{Pauli, PauliError, PauliString};

/// Stabilizer state as stabilizer/destabilizer generator pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    num_qubits: usize,
    stabilizers: Vec<PauliString>,
    destabilizers: Vec<PauliString>,
}

impl StabilizerTableau {
    /// `|0...0>`.
    pub fn new(num_qubits: usize) -> Self {
        let single = |q, p| PauliString::single(num_qubits, q, p).expect("in range");
        StabilizerTableau {
            num_qubits,
            stabilizers: (0..num_qubits).map(|q| single(q, Pauli::Z)).collect(),
            destabilizers: (0..num_qubits).map(|q| single(q, Pauli::X)).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }

    pub fn apply(&mut self, op: &CliffordOp) -> Result<(), PauliError> {
        if op.max_target() >= self.num_qubits {
            return Err(PauliError::QubitOutOfRange {
                qubit: op.max_target(),
                num_qubits: self.num_qubits,
            });
        }
        for row in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            op.apply_unchecked(row);
        }
        Ok(())
    }

    pub fn apply_all(&mut self, ops: &[CliffordOp]) -> Result<(), PauliError> {
        ops.iter().try_for_each(|op| self.apply(op))
    }

    /// `<psi|p|psi>` for Hermitian `p`: +1 or -1 when `±p` is a stabilizer, else 0.
    pub fn expectation(&self, p: &PauliString) -> i8 {
        assert_eq!(p.num_qubits(), self.num_qubits, "size mismatch");
        assert!(p.is_hermitian(), "expectation of non-Hermitian {p}");
        if self.stabilizers.iter().any(|s| !s.commutes_unchecked(p)) {
            return 0;
        }
        let mut acc = PauliString::identity(self.num_qubits);
        for (s, d) in self.stabilizers.iter().zip(&self.destabilizers) {
            if !d.commutes_unchecked(p) {
                acc = acc.mul_unchecked(s);
            }
        }
        debug_assert_eq!(acc.x_words(), p.x_words());
        debug_assert_eq!(acc.z_words(), p.z_words());
        match (p.phase() + 4 - acc.phase()) & 3 {
            0 => 1,
            2 => -1,
            _ => unreachable!("stabilizer products are Hermitian"),
        }
    }

    /// Checks the canonical commutation pattern of the generators.
    pub fn is_valid(&self) -> bool {
        let n = self.num_qubits;
        for i in 0..n {
            for j in 0..n {
                let ss = self.stabilizers[i].commutes_unchecked(&self.stabilizers[j]);
                let dd = self.destabilizers[i].commutes_unchecked(&self.destabilizers[j]);
                let sd = self.stabilizers[i].commutes_unchecked(&self.destabilizers[j]);
                if !ss || !dd || sd == (i == j) {
                    return false;
                }
            }
            if !self.stabilizers[i].is_hermitian() {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Gate;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn zero_state() {
        let t = StabilizerTableau::new(1);
        assert_eq!(t.expectation(&p("Z")), 1);
        assert_eq!(t.expectation(&p("-Z")), -1);
        assert_eq!(t.expectation(&p("X")), 0);
    }

    #[test]
    fn plus_state() {
        let mut t = StabilizerTableau::new(1);
        t.apply(&CliffordOp::new(Gate::H, &[0]).unwrap()).unwrap();
        assert_eq!(t.expectation(&p("X")), 1);
    }

    #[test]
    fn bell_state() {
        let mut t = StabilizerTableau::new(2);
        t.apply(&CliffordOp::new(Gate::H, &[0]).unwrap()).unwrap();
        t.apply(&CliffordOp::new(Gate::CX, &[0, 1]).unwrap()).unwrap();
        assert_eq!(t.expectation(&p("XX")), 1);
        assert_eq!(t.expectation(&p("ZZ")), 1);
        assert_eq!(t.expectation(&p("YY")), -1);
        assert_eq!(t.expectation(&p("ZI")), 0);
        assert!(t.is_valid());
    }

    #[test]
    fn out_of_range_gate() {
        let mut t = StabilizerTableau::new(2);
        assert!(t.apply(&CliffordOp::new(Gate::CX, &[0, 2]).unwrap()).is_err());
    }
}
