use demforge_circuit::{ExpandedCircuit, NoiseSite};
use demforge_errgen::{site_generator, Chi, Eeg, ErrorModel, SparseGenerator};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::dense::{column_entry, i_pow, pauli_from_index, pauli_index, x_mask, z_mask};
use crate::OracleError;

/// Largest register a dense channel is built on.
pub const MAX_CHANNEL_QUBITS: usize = 6;

fn check_channel(n: usize) -> Result<(), OracleError> {
    if n > MAX_CHANNEL_QUBITS {
        return Err(OracleError::TooManyQubits { what: "channel", qubits: n, cap: MAX_CHANNEL_QUBITS });
    }
    Ok(())
}

/// Pauli-transfer matrix `R_ij = 2^{-n} Tr(P_i L(P_j))` of a generator.
pub fn generator_ptm(g: &SparseGenerator) -> Result<DMatrix<f64>, OracleError> {
    let n = g.num_qubits();
    check_channel(n)?;
    let d = 1 << (2 * n);
    let chi = Chi::from_generator(g);
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let pj = pauli_from_index(n, j);
        for (a, b, v) in chi.entries() {
            let t = a.mul_unchecked(&pj).mul_unchecked(b);
            m[(pauli_index(&t), j)] += (v * i_pow(u32::from(t.phase()))).re;
        }
    }
    Ok(m)
}

/// A channel on at most [`MAX_CHANNEL_QUBITS`] qubits as a real Pauli-transfer matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSuperoperator {
    num_qubits: usize,
    ptm: DMatrix<f64>,
}

/// `exp(g)` as a dense channel.
pub fn dense_exp(g: &SparseGenerator) -> Result<DenseSuperoperator, OracleError> {
    let ptm = generator_ptm(g)?;
    Ok(DenseSuperoperator { num_qubits: g.num_qubits(), ptm: ptm.exp() })
}

impl DenseSuperoperator {
    pub fn identity(num_qubits: usize) -> Result<Self, OracleError> {
        check_channel(num_qubits)?;
        let d = 1 << (2 * num_qubits);
        Ok(DenseSuperoperator { num_qubits, ptm: DMatrix::identity(d, d) })
    }

    pub fn from_ptm(num_qubits: usize, ptm: DMatrix<f64>) -> Result<Self, OracleError> {
        check_channel(num_qubits)?;
        assert_eq!(ptm.nrows(), 1 << (2 * num_qubits));
        Ok(DenseSuperoperator { num_qubits, ptm })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ptm(&self) -> &DMatrix<f64> {
        &self.ptm
    }

    /// `E∘F`.
    pub fn compose(&self, inner: &DenseSuperoperator) -> DenseSuperoperator {
        assert_eq!(self.num_qubits, inner.num_qubits);
        DenseSuperoperator { num_qubits: self.num_qubits, ptm: &self.ptm * &inner.ptm }
    }

    /// Superoperator on column-stacked density matrices: entry
    /// `[r | c << n, r' | c' << n] = ⟨r| E(|r'⟩⟨c'|) |c⟩`.
    pub fn matrix_units(&self) -> DMatrix<Complex64> {
        let n = self.num_qubits;
        let (dim, d) = (1 << n, 1 << (2 * n));
        let mut v = DMatrix::<Complex64>::zeros(d, d);
        for j in 0..d {
            let p = pauli_from_index(n, j);
            let (xm, zm) = (x_mask(&p), z_mask(&p));
            for c in 0..dim {
                let (r, val) = column_entry(&p, xm, zm, c);
                v[(r | (c << n), j)] = val;
            }
        }
        let r = self.ptm.map(Complex64::from);
        (&v * r * v.adjoint()).unscale(dim as f64)
    }

    /// Choi matrix `Σ |r'⟩⟨c'| ⊗ E(|r'⟩⟨c'|)`, trace `2^n`.
    pub fn choi(&self) -> DMatrix<Complex64> {
        let n = self.num_qubits;
        let dim = 1 << n;
        let s = self.matrix_units();
        DMatrix::from_fn(dim * dim, dim * dim, |row, col| {
            let (rp, r) = (row % dim, row / dim);
            let (cp, c) = (col % dim, col / dim);
            s[(r | (c << n), rp | (cp << n))]
        })
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.choi()).eigenvalues.min()
    }

    /// Trace preserving and completely positive, both to `tol`.
    pub fn is_cptp(&self, tol: f64) -> bool {
        let tp = (0..self.ptm.ncols()).all(|j| (self.ptm[(0, j)] - f64::from(u8::from(j == 0))).abs() <= tol);
        tp && self.choi_min_eigenvalue() >= -tol
    }

    /// Diagonal of the transfer matrix, indexed by Pauli code.
    pub fn pauli_fidelities(&self) -> Vec<f64> {
        self.ptm.diagonal().iter().copied().collect()
    }

    pub fn is_pauli_diagonal(&self, tol: f64) -> bool {
        let d = self.ptm.nrows();
        (0..d).all(|i| (0..d).all(|j| i == j || self.ptm[(i, j)].abs() <= tol))
    }

    /// Error probabilities of the Pauli twirl, `p_P = 4^{-n} Σ_Q (−1)^{⟨P,Q⟩} f_Q`.
    pub fn pauli_probabilities(&self) -> Vec<f64> {
        let n = self.num_qubits;
        let d = 1 << (2 * n);
        let f = self.pauli_fidelities();
        let paulis: Vec<_> = (0..d).map(|i| pauli_from_index(n, i)).collect();
        paulis
            .iter()
            .map(|p| {
                let s: f64 = paulis
                    .iter()
                    .zip(&f)
                    .map(|(q, fq)| if p.commutes_unchecked(q) { *fq } else { -fq })
                    .sum();
                s / d as f64
            })
            .collect()
    }
}

/// The bound channel of a noise site on the site's own qubits, in target order.
pub fn local_generator(ec: &ExpandedCircuit, m: &ErrorModel, site: &NoiseSite) -> Result<SparseGenerator, OracleError> {
    let full = site_generator(ec, m, site)?;
    let mut out = SparseGenerator::new(site.qubits.len());
    for (e, r) in full.iter() {
        let p = e.p().restrict(&site.qubits);
        let q = e.q().map(|q| q.restrict(&site.qubits));
        if let Some((le, f)) = Eeg::canonical(e.sector(), &p, q.as_ref()).expect("restriction keeps valid indices") {
            out.add(le, f * r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use demforge_errgen::Sector;
    use demforge_pauli::PauliString;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn empty_generator_is_identity() {
        let e = dense_exp(&SparseGenerator::new(2)).unwrap();
        assert_eq!(e, DenseSuperoperator::identity(2).unwrap());
    }

    #[test]
    fn bit_flip_damps_y_and_z() {
        let s = 0.03;
        let mut g = SparseGenerator::new(1);
        g.add_term(Sector::S, &p("X"), None, s).unwrap();
        let f = dense_exp(&g).unwrap().pauli_fidelities();
        let want = [1.0, 1.0, (-2.0 * s).exp(), (-2.0 * s).exp()];
        for (a, b) in f.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn amplitude_damping_is_cptp() {
        let mut g = SparseGenerator::new(1);
        g.add_term(Sector::S, &p("X"), None, 0.01).unwrap();
        g.add_term(Sector::S, &p("Y"), None, 0.01).unwrap();
        g.add_term(Sector::A, &p("X"), Some(&p("Y")), -0.01).unwrap();
        let e = dense_exp(&g).unwrap();
        assert!(e.is_cptp(1e-10));
        // |1><1| decays into |0><0| and nothing flows back
        let s = e.matrix_units();
        assert!(s[(0, 3)].re > 0.03);
        assert!(s[(3, 0)].norm() < 1e-15);
    }

    #[test]
    fn negative_stochastic_rate_is_not_cp() {
        let mut g = SparseGenerator::new(1);
        g.add_term(Sector::S, &p("Z"), None, -0.01).unwrap();
        assert!(!dense_exp(&g).unwrap().is_cptp(1e-10));
    }

    #[test]
    fn twirled_rotation() {
        let h = 0.07;
        let mut g = SparseGenerator::new(1);
        g.add_term(Sector::H, &p("X"), None, h).unwrap();
        let e = dense_exp(&g).unwrap();
        assert!(!e.is_pauli_diagonal(1e-12));
        let probs = e.pauli_probabilities();
        assert!((probs[1] - h.sin().powi(2)).abs() < 1e-14);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn channel_cap() {
        assert!(matches!(
            generator_ptm(&SparseGenerator::new(7)),
            Err(OracleError::TooManyQubits { .. })
        ));
    }
}
