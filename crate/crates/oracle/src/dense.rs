use demforge_pauli::{Pauli, PauliString};
use nalgebra::DMatrix;
use num_complex::Complex64;

const CODE: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Base-4 code of the unsigned Pauli (`I, X, Y, Z = 0..3`, qubit 0 least significant).
pub fn pauli_index(p: &PauliString) -> usize {
    (0..p.num_qubits())
        .rev()
        .fold(0, |acc, q| 4 * acc + CODE.iter().position(|&c| c == p.get(q)).expect("valid Pauli"))
}

pub fn pauli_from_index(num_qubits: usize, mut idx: usize) -> PauliString {
    let mut p = PauliString::identity(num_qubits);
    for q in 0..num_qubits {
        p.set(q, CODE[idx % 4]).expect("in range");
        idx /= 4;
    }
    p
}

pub(crate) fn x_mask(p: &PauliString) -> usize {
    (0..p.num_qubits()).filter(|&q| p.x_bit(q)).map(|q| 1 << q).sum()
}

pub(crate) fn z_mask(p: &PauliString) -> usize {
    (0..p.num_qubits()).filter(|&q| p.z_bit(q)).map(|q| 1 << q).sum()
}

/// `⟨r|P|c⟩` for the column `c`; the only nonzero row is `c ^ x_mask`.
pub(crate) fn column_entry(p: &PauliString, xm: usize, zm: usize, c: usize) -> (usize, Complex64) {
    let ys = (xm & zm).count_ones();
    let sign = (c & zm).count_ones();
    (c ^ xm, i_pow(u32::from(p.phase()) + ys + 2 * sign))
}

pub fn pauli_matrix(p: &PauliString) -> DMatrix<Complex64> {
    let d = 1 << p.num_qubits();
    let (xm, zm) = (x_mask(p), z_mask(p));
    let mut m = DMatrix::zeros(d, d);
    for c in 0..d {
        let (r, v) = column_entry(p, xm, zm, c);
        m[(r, c)] = v;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for i in 0..64 {
            assert_eq!(pauli_index(&pauli_from_index(3, i)), i);
        }
        assert_eq!(pauli_index(&"XI".parse().unwrap()), 1);
        assert_eq!(pauli_index(&"IZ".parse().unwrap()), 12);
    }

    #[test]
    fn matrices_multiply_like_paulis() {
        for a in 0..16 {
            for b in 0..16 {
                let (pa, pb) = (pauli_from_index(2, a), pauli_from_index(2, b));
                let prod = pa.mul_unchecked(&pb);
                assert_eq!(pauli_matrix(&pa) * pauli_matrix(&pb), pauli_matrix(&prod));
            }
        }
    }

    #[test]
    fn y_matrix() {
        let y = pauli_matrix(&"Y".parse().unwrap());
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
    }
}
