use std::collections::BTreeMap;
use std::fmt;

use demforge_pauli::PauliString;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eeg::{Eeg, EegError, Sector};

/// Relative size below which a sum of two rates is treated as an exact cancellation.
pub const CANCELLATION_TOLERANCE: f64 = 1e-12;

/// Sparse linear combination of EEGs on a fixed register.
#[derive(Clone, PartialEq, Default)]
pub struct SparseGenerator {
    num_qubits: usize,
    terms: BTreeMap<Eeg, f64>,
}

impl SparseGenerator {
    pub fn new(num_qubits: usize) -> Self {
        SparseGenerator {
            num_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Eeg, f64)> {
        self.terms.iter().map(|(e, &r)| (e, r))
    }

    pub fn rate(&self, e: &Eeg) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    /// Adds `rate * e`. Zero results and sums that cancel to within
    /// [`CANCELLATION_TOLERANCE`] of the operands are removed.
    pub fn add(&mut self, e: Eeg, rate: f64) {
        assert_eq!(e.num_qubits(), self.num_qubits, "EEG register size");
        if rate == 0.0 {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(r) => {
                let old = *r;
                let new = old + rate;
                if new == 0.0 || new.abs() <= CANCELLATION_TOLERANCE * old.abs().max(rate.abs()) {
                    self.terms.remove(&e);
                } else {
                    *r = new;
                }
            }
            None => {
                self.terms.insert(e, rate);
            }
        }
    }

    /// Adds `rate` times the generator of `sector` on signed indices.
    pub fn add_term(
        &mut self,
        sector: Sector,
        p: &PauliString,
        q: Option<&PauliString>,
        rate: f64,
    ) -> Result<(), EegError> {
        if let Some((e, f)) = Eeg::canonical(sector, p, q)? {
            self.add(e, f * rate);
        }
        Ok(())
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &SparseGenerator, factor: f64) {
        for (e, r) in other.iter() {
            self.add(e.clone(), factor * r);
        }
    }

    pub fn scaled(&self, factor: f64) -> SparseGenerator {
        let mut out = SparseGenerator::new(self.num_qubits);
        out.add_scaled(self, factor);
        out
    }

    /// Terms satisfying `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&Eeg, f64) -> bool) -> SparseGenerator {
        SparseGenerator {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(e, &r)| keep(e, r))
                .map(|(e, &r)| (e.clone(), r))
                .collect(),
        }
    }

    /// Moves a generator on `qubits.len()` qubits onto `qubits` of a larger register.
    pub fn embed(&self, num_qubits: usize, qubits: &[usize]) -> SparseGenerator {
        let mut out = SparseGenerator::new(num_qubits);
        for (e, r) in self.iter() {
            let p = e.p().embed(num_qubits, qubits).expect("embedding fits");
            let q = e.q().map(|q| q.embed(num_qubits, qubits).expect("embedding fits"));
            out.add_term(e.sector(), &p, q.as_ref(), r)
                .expect("embedding keeps indices valid");
        }
        out
    }

    /// `Σ h² + Σ s` over the H and S terms.
    pub fn infidelity(&self) -> f64 {
        self.iter()
            .map(|(e, r)| match e.sector() {
                Sector::H => r * r,
                Sector::S => r,
                _ => 0.0,
            })
            .sum()
    }

    pub fn has_only(&self, sector: Sector) -> bool {
        self.terms.keys().all(|e| e.sector() == sector)
    }

    /// Hermitian rate matrix of the S, C and A terms over the Pauli indices they use:
    /// diagonal `s_P`, entry `(P, Q)` with `P < Q` equal to `c + i a`.
    pub fn dissipative_matrix(&self) -> (Vec<PauliString>, DMatrix<Complex64>) {
        let mut idx: Vec<PauliString> = self
            .terms
            .keys()
            .filter(|e| e.sector() != Sector::H)
            .flat_map(|e| e.indices().cloned())
            .collect();
        idx.sort();
        idx.dedup();
        let pos = |p: &PauliString| idx.binary_search(p).expect("collected above");
        let mut m = DMatrix::<Complex64>::zeros(idx.len(), idx.len());
        for (e, r) in self.iter() {
            match e.sector() {
                Sector::H => {}
                Sector::S => {
                    let i = pos(e.p());
                    m[(i, i)] += Complex64::new(r, 0.0);
                }
                Sector::C | Sector::A => {
                    let (i, j) = (pos(e.p()), pos(e.q().expect("two indices")));
                    let v = if e.sector() == Sector::C {
                        Complex64::new(r, 0.0)
                    } else {
                        Complex64::new(0.0, r)
                    };
                    m[(i, j)] += v;
                    m[(j, i)] += v.conj();
                }
            }
        }
        (idx, m)
    }

    /// Smallest eigenvalue of [`Self::dissipative_matrix`] (0 when empty). The
    /// generator is completely positive exactly when this is nonnegative.
    pub fn dissipative_min_eigenvalue(&self) -> f64 {
        let (_, m) = self.dissipative_matrix();
        if m.nrows() == 0 {
            return 0.0;
        }
        m.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_cptp(&self, tol: f64) -> bool {
        self.dissipative_min_eigenvalue() >= -tol
    }
}

impl fmt::Debug for SparseGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl FromIterator<(Eeg, f64)> for SparseGenerator {
    /// Panics on an empty iterator; the register size comes from the first EEG.
    fn from_iter<T: IntoIterator<Item = (Eeg, f64)>>(iter: T) -> Self {
        let mut it = iter.into_iter().peekable();
        let n = it.peek().expect("at least one term").0.num_qubits();
        let mut out = SparseGenerator::new(n);
        for (e, r) in it {
            out.add(e, r);
        }
        out
    }
}
