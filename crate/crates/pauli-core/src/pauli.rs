use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("invalid pauli string {0:?}")]
    Parse(String),
    #[error("gate {gate} expects {expected} targets, got {got}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("repeated target qubit {0}")]
    RepeatedTarget(usize),
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase * P_0 ⊗ P_1 ⊗ ...` with qubit `q` stored at bit `q % 64` of word `q / 64`.
/// A qubit with both bits set is `Y` (Hermitian), not `XZ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    num_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

#[inline]
fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        PauliString {
            num_qubits,
            x: vec![0; words(num_qubits)],
            z: vec![0; words(num_qubits)],
            phase: 0,
        }
    }

    pub fn single(num_qubits: usize, qubit: usize, p: Pauli) -> Result<Self, PauliError> {
        let mut out = Self::identity(num_qubits);
        out.set(qubit, p)?;
        Ok(out)
    }

    /// Builds a Pauli from `(qubit, label)` pairs; later entries overwrite earlier ones.
    pub fn from_sparse(num_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self, PauliError> {
        let mut out = Self::identity(num_qubits);
        for &(q, p) in ops {
            out.set(q, p)?;
        }
        Ok(out)
    }

    pub fn from_bits(num_qubits: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Self {
        assert_eq!(x.len(), words(num_qubits));
        assert_eq!(z.len(), words(num_qubits));
        let mut out = PauliString {
            num_qubits,
            x,
            z,
            phase: phase & 3,
        };
        out.mask_tail();
        out
    }

    fn mask_tail(&mut self) {
        let r = self.num_qubits % 64;
        if r != 0 {
            let m = (1u64 << r) - 1;
            if let Some(w) = self.x.last_mut() {
                *w &= m;
            }
            if let Some(w) = self.z.last_mut() {
                *w &= m;
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    /// Multiplies by `i^k`.
    pub fn mul_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) & 3;
    }

    pub fn negate(&mut self) {
        self.mul_phase(2);
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// +1 or -1 for Hermitian strings.
    pub fn sign(&self) -> i8 {
        debug_assert!(self.is_hermitian());
        if self.phase == 2 {
            -1
        } else {
            1
        }
    }

    /// Same Pauli with phase reset to 0, and the sign that was dropped.
    pub fn unsigned(&self) -> (PauliString, i8) {
        assert!(self.is_hermitian(), "unsigned() of non-Hermitian {self}");
        let s = self.sign();
        (self.clone().with_phase(0), s)
    }

    pub fn get(&self, q: usize) -> Pauli {
        assert!(q < self.num_qubits, "qubit {q} out of range");
        let (w, b) = (q / 64, q % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn set(&mut self, q: usize, p: Pauli) -> Result<(), PauliError> {
        if q >= self.num_qubits {
            return Err(PauliError::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        let (xb, zb) = p.bits();
        self.set_bits(q, xb, zb);
        Ok(())
    }

    #[inline]
    pub(crate) fn set_bits(&mut self, q: usize, xb: bool, zb: bool) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        if xb {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if zb {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Qubits where the string is not the identity, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = a | b;
            while m != 0 {
                let t = m.trailing_zeros() as usize;
                out.push(w * 64 + t);
                m &= m - 1;
            }
        }
        out
    }

    /// True when the two strings act nontrivially on a common qubit.
    pub fn overlaps(&self, other: &PauliString) -> bool {
        self.x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .any(|((a, b), (c, d))| (a | b) & (c | d) != 0)
    }

    fn check_size(&self, other: &PauliString) -> Result<(), PauliError> {
        if self.num_qubits != other.num_qubits {
            Err(PauliError::SizeMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// `self * other` without the size check (panics on mismatch in debug builds).
    pub fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        let mut acc: i64 = self.phase as i64 + other.phase as i64;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for i in 0..self.x.len() {
            let (xa, za, xb, zb) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let xr = xa ^ xb;
            let zr = za ^ zb;
            acc += (xa & za).count_ones() as i64;
            acc += (xb & zb).count_ones() as i64;
            acc += 2 * (za & xb).count_ones() as i64;
            acc -= (xr & zr).count_ones() as i64;
            x.push(xr);
            z.push(zr);
        }
        PauliString {
            num_qubits: self.num_qubits,
            x,
            z,
            phase: acc.rem_euclid(4) as u8,
        }
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.check_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub fn commutes_unchecked(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones() & 1;
        }
        parity == 0
    }

    /// Restriction to the listed qubits, in list order. Phase is kept.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set_bits(i, self.x_bit(q), self.z_bit(q));
        }
        out.phase = self.phase;
        out
    }

    /// Places a `k`-qubit string onto `qubits` of an `n`-qubit register.
    pub fn embed(&self, num_qubits: usize, qubits: &[usize]) -> Result<PauliString, PauliError> {
        if qubits.len() != self.num_qubits {
            return Err(PauliError::SizeMismatch {
                left: self.num_qubits,
                right: qubits.len(),
            });
        }
        let mut out = PauliString::identity(num_qubits);
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(PauliError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            out.set_bits(q, self.x_bit(i), self.z_bit(i));
        }
        out.phase = self.phase;
        Ok(out)
    }

    /// Label string without the phase, one character per qubit.
    pub fn label(&self) -> String {
        (0..self.num_qubits).map(|q| self.get(q).to_char()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.label())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Accepts an optional `+`, `-`, `i`, `+i`, `-i` prefix followed by `IXYZ_` characters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (mut phase, rest) = if let Some(r) = t.strip_prefix('-') {
            (2u8, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0u8, r)
        } else {
            (0u8, t)
        };
        let rest = if let Some(r) = rest.strip_prefix('i') {
            phase += 1;
            r
        } else {
            rest
        };
        if rest.is_empty() {
            return Err(PauliError::Parse(s.to_string()));
        }
        let mut out = PauliString::identity(rest.chars().count());
        for (q, c) in rest.chars().enumerate() {
            let p = Pauli::from_char(c).ok_or_else(|| PauliError::Parse(s.to_string()))?;
            out.set(q, p)?;
        }
        out.phase = phase & 3;
        Ok(out)
    }
}
