//! Exact sparse superoperator algebra in the process-matrix form
//! `L(ρ) = Σ χ_ab P_a ρ P_b`.
//!
//! Compositions and commutators of trace-preserving, Hermiticity-preserving
//! generators stay in that class, which the EEG basis spans exactly, so the
//! decomposition back to EEGs loses nothing.

use std::collections::BTreeMap;

use demforge_pauli::PauliString;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::eeg::{Eeg, Sector};
use crate::generator::SparseGenerator;

const I1: Complex64 = Complex64::new(0.0, 1.0);

fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => I1,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I1,
    }
}

/// Unsigned Pauli product `a b = i^k R`, returned as `(R, i^k)`.
fn product(a: &PauliString, b: &PauliString) -> (PauliString, Complex64) {
    let mut r = a.mul_unchecked(b);
    let ph = r.phase();
    r.set_phase(0);
    (r, i_pow(ph))
}

/// Entries are kept sorted so that every sum runs in a fixed order.
#[derive(Clone, Debug, Default)]
pub struct Chi {
    num_qubits: usize,
    entries: BTreeMap<(PauliString, PauliString), Complex64>,
}

impl Chi {
    pub fn new(num_qubits: usize) -> Self {
        Chi {
            num_qubits,
            entries: BTreeMap::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, a: &PauliString, b: &PauliString) -> Complex64 {
        self.entries
            .get(&(a.clone(), b.clone()))
            .copied()
            .unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PauliString, &PauliString, Complex64)> {
        self.entries.iter().map(|((a, b), &v)| (a, b, v))
    }

    pub fn add(&mut self, a: PauliString, b: PauliString, v: Complex64) {
        if v == Complex64::default() {
            return;
        }
        *self.entries.entry((a, b)).or_default() += v;
    }

    /// Adds `rate * e`.
    pub fn add_eeg(&mut self, e: &Eeg, rate: f64) {
        let n = self.num_qubits;
        let id = PauliString::identity(n);
        let p = e.p().clone();
        match e.sector() {
            Sector::H => {
                self.add(p.clone(), id.clone(), -I1 * rate);
                self.add(id, p, I1 * rate);
            }
            Sector::S => {
                self.add(p.clone(), p, rate.into());
                self.add(id.clone(), id, (-rate).into());
            }
            Sector::C | Sector::A => {
                let q = e.q().expect("two indices").clone();
                let (r, ph) = product(&p, &q);
                if e.sector() == Sector::C {
                    self.add(p.clone(), q.clone(), rate.into());
                    self.add(q, p, rate.into());
                    if ph.im == 0.0 {
                        // commuting: {P,Q} = 2σR
                        let v = -ph * rate;
                        self.add(r.clone(), id.clone(), v);
                        self.add(id, r, v);
                    }
                } else {
                    self.add(p.clone(), q.clone(), I1 * rate);
                    self.add(q, p, -I1 * rate);
                    if ph.re == 0.0 {
                        // anticommuting: [P,Q] = 2τR
                        let v = I1 * ph * rate;
                        self.add(r.clone(), id.clone(), v);
                        self.add(id, r, v);
                    }
                }
            }
        }
    }

    pub fn from_generator(g: &SparseGenerator) -> Chi {
        let mut c = Chi::new(g.num_qubits());
        for (e, r) in g.iter() {
            c.add_eeg(e, r);
        }
        c
    }

    pub fn from_eeg(e: &Eeg, rate: f64) -> Chi {
        let mut c = Chi::new(e.num_qubits());
        c.add_eeg(e, rate);
        c
    }

    /// `self += factor * (a ∘ b)`, where `(a ∘ b)(ρ) = a(b(ρ))`.
    pub fn add_composition(&mut self, a: &Chi, b: &Chi, factor: Complex64) {
        for ((pa, pb), &alpha) in &a.entries {
            for ((pc, pd), &gamma) in &b.entries {
                let (left, l_ph) = product(pa, pc);
                let (right, r_ph) = product(pd, pb);
                self.add(left, right, factor * alpha * gamma * l_ph * r_ph);
            }
        }
    }

    /// EEG decomposition. Assumes a trace-preserving, Hermiticity-preserving map;
    /// the identity-identity entry and the real parts of identity rows are implied
    /// by those properties and are not read.
    pub fn to_generator(&self) -> SparseGenerator {
        let mut out = SparseGenerator::new(self.num_qubits);
        for ((a, b), v) in &self.entries {
            let (ai, bi) = (a.is_identity(), b.is_identity());
            if ai {
                continue;
            }
            if bi {
                out.add(Eeg::from_canonical_parts(Sector::H, a.clone(), None), -v.im);
            } else if a == b {
                out.add(Eeg::from_canonical_parts(Sector::S, a.clone(), None), v.re);
            } else if a < b {
                out.add(Eeg::from_canonical_parts(Sector::C, a.clone(), Some(b.clone())), v.re);
                out.add(Eeg::from_canonical_parts(Sector::A, a.clone(), Some(b.clone())), v.im);
            }
        }
        out
    }
}

fn drop_roundoff(g: SparseGenerator, scale: f64) -> SparseGenerator {
    let cut = crate::generator::CANCELLATION_TOLERANCE * scale;
    g.filtered(|_, r| r.abs() > cut)
}

/// `a ∘ b` for single EEGs with unit rates.
pub fn compose(a: &Eeg, b: &Eeg) -> SparseGenerator {
    let mut c = Chi::new(a.num_qubits());
    c.add_composition(&Chi::from_eeg(a, 1.0), &Chi::from_eeg(b, 1.0), 1.0.into());
    drop_roundoff(c.to_generator(), 1.0)
}

/// `[a, b] = a∘b − b∘a` for single EEGs with unit rates.
pub fn commutator(a: &Eeg, b: &Eeg) -> SparseGenerator {
    if a.trivially_commutes_with(b) {
        return SparseGenerator::new(a.num_qubits());
    }
    let (ca, cb) = (Chi::from_eeg(a, 1.0), Chi::from_eeg(b, 1.0));
    let mut c = Chi::new(a.num_qubits());
    c.add_composition(&ca, &cb, 1.0.into());
    c.add_composition(&cb, &ca, (-1.0).into());
    drop_roundoff(c.to_generator(), 1.0)
}

/// `a ∘ b` for generators.
pub fn compose_generators(a: &SparseGenerator, b: &SparseGenerator) -> SparseGenerator {
    let mut out = SparseGenerator::new(a.num_qubits());
    for (ea, ra) in a.iter() {
        for (eb, rb) in b.iter() {
            out.add_scaled(&compose(ea, eb), ra * rb);
        }
    }
    out
}

/// `[a, b]` for generators, skipping pairs that trivially commute. Terms of `a`
/// are processed in parallel and summed in a fixed order.
pub fn commutator_generators(a: &SparseGenerator, b: &SparseGenerator) -> SparseGenerator {
    let terms: Vec<(&Eeg, f64)> = a.iter().collect();
    let parts: Vec<SparseGenerator> = terms
        .par_iter()
        .map(|&(ea, ra)| {
            let mut part = SparseGenerator::new(a.num_qubits());
            for (eb, rb) in b.iter() {
                if !ea.trivially_commutes_with(eb) {
                    part.add_scaled(&commutator(ea, eb), ra * rb);
                }
            }
            part
        })
        .collect();
    let mut out = SparseGenerator::new(a.num_qubits());
    for part in &parts {
        out.add_scaled(part, 1.0);
    }
    out
}
