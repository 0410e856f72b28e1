use std::collections::BTreeMap;

use demforge_circuit::ExpandedCircuit;
use demforge_dem::Distribution;
use demforge_errgen::{ErrorModel, SparseGenerator};
use demforge_pauli::{conjugate_sequence, CliffordOp, Gate};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense::pauli_from_index;
use crate::superop::{dense_exp, local_generator, DenseSuperoperator};
use crate::OracleError;

/// Largest number of simultaneously live qubits in the density-matrix simulation.
pub const MAX_STATE_QUBITS: usize = 12;

const DIAGONAL_TOL: f64 = 1e-13;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gate_unitary(g: Gate) -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match g {
        Gate::H => DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
        Gate::S => DMatrix::from_row_slice(2, 2, &[o, z, z, i]),
        Gate::SDag => DMatrix::from_row_slice(2, 2, &[o, z, z, -i]),
        Gate::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Gate::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Gate::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        // local index = first target | second target << 1
        Gate::CX => DMatrix::from_fn(4, 4, |r, col| {
            let out = if col & 1 == 1 { col ^ 2 } else { col };
            if r == out { o } else { z }
        }),
        Gate::CZ => DMatrix::from_fn(4, 4, |r, col| match (r == col, col) {
            (true, 3) => -o,
            (true, _) => o,
            _ => z,
        }),
        Gate::Swap => DMatrix::from_fn(4, 4, |r, col| {
            let out = ((col & 1) << 1) | (col >> 1);
            if r == out { o } else { z }
        }),
    }
}

/// Applies `m` to the bits `positions` of every index of `v` (local bit `j` is
/// `positions[j]`).
fn apply_on_bits(v: &mut [Complex64], positions: &[usize], m: &DMatrix<Complex64>) {
    let size = 1usize << positions.len();
    let mask: usize = positions.iter().map(|&p| 1 << p).sum();
    let offsets: Vec<usize> = (0..size)
        .map(|j| (0..positions.len()).filter(|&b| (j >> b) & 1 == 1).map(|b| 1 << positions[b]).sum())
        .collect();
    let mut buf = vec![Complex64::default(); size];
    for base in 0..v.len() {
        if base & mask != 0 {
            continue;
        }
        for (j, off) in offsets.iter().enumerate() {
            buf[j] = v[base + off];
        }
        for (i, off) in offsets.iter().enumerate() {
            let mut s = Complex64::default();
            for (j, b) in buf.iter().enumerate() {
                s += m[(i, j)] * b;
            }
            v[base + off] = s;
        }
    }
}

/// Unnormalized density matrices over the live qubits, one per partial
/// detection-history mask, stored as `ρ[r | c << m]`.
struct State {
    slot_of: Vec<Option<usize>>,
    qubit_of: Vec<usize>,
    branches: BTreeMap<u64, Vec<Complex64>>,
}

impl State {
    fn new(n: usize) -> Self {
        let mut branches = BTreeMap::new();
        branches.insert(0, vec![Complex64::new(1.0, 0.0)]);
        State { slot_of: vec![None; n], qubit_of: Vec::new(), branches }
    }

    fn live(&self) -> usize {
        self.qubit_of.len()
    }

    fn ensure(&mut self, q: usize) -> Result<usize, OracleError> {
        if let Some(s) = self.slot_of[q] {
            return Ok(s);
        }
        let m = self.live();
        if m + 1 > MAX_STATE_QUBITS {
            return Err(OracleError::TooManyQubits { what: "live state", qubits: m + 1, cap: MAX_STATE_QUBITS });
        }
        let dim = 1usize << m;
        for rho in self.branches.values_mut() {
            let mut out = vec![Complex64::default(); 4 * dim * dim];
            for col in 0..dim {
                for row in 0..dim {
                    out[row | (col << (m + 1))] = rho[row | (col << m)];
                }
            }
            *rho = out;
        }
        self.slot_of[q] = Some(m);
        self.qubit_of.push(q);
        Ok(m)
    }

    /// Measures `q` in the Z basis and drops it; outcome 1 flips `flips`.
    fn retire(&mut self, q: usize, flips: u64) {
        let Some(s) = self.slot_of[q] else { return };
        let m = self.live();
        let half = 1usize << (m - 1);
        let insert = |x: usize, b: usize| ((x >> s) << (s + 1)) | (b << s) | (x & ((1 << s) - 1));
        let mut next: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
        for (key, rho) in std::mem::take(&mut self.branches) {
            for b in 0..2 {
                let mut out = vec![Complex64::default(); half * half];
                let mut weight = 0.0;
                for col in 0..half {
                    for row in 0..half {
                        let v = rho[insert(row, b) | (insert(col, b) << m)];
                        out[row | (col << (m - 1))] = v;
                        if row == col {
                            weight += v.re;
                        }
                    }
                }
                if weight == 0.0 && out.iter().all(|v| *v == Complex64::default()) {
                    continue;
                }
                let k = if b == 1 { key ^ flips } else { key };
                match next.get_mut(&k) {
                    Some(acc) => acc.iter_mut().zip(&out).for_each(|(a, v)| *a += v),
                    None => {
                        next.insert(k, out);
                    }
                }
            }
        }
        self.branches = next;
        self.slot_of[q] = None;
        self.qubit_of.remove(s);
        for (i, &qq) in self.qubit_of.iter().enumerate() {
            self.slot_of[qq] = Some(i);
        }
    }

    fn apply_unitary(&mut self, qubits: &[usize], u: &DMatrix<Complex64>) -> Result<(), OracleError> {
        let slots: Vec<usize> = qubits.iter().map(|&q| self.ensure(q)).collect::<Result<_, _>>()?;
        let m = self.live();
        let rows = slots.clone();
        let cols: Vec<usize> = slots.iter().map(|s| s + m).collect();
        let uc = u.map(|x| x.conj());
        for rho in self.branches.values_mut() {
            apply_on_bits(rho, &rows, u);
            apply_on_bits(rho, &cols, &uc);
        }
        Ok(())
    }

    fn apply_channel(&mut self, qubits: &[usize], s: &DMatrix<Complex64>) -> Result<(), OracleError> {
        let slots: Vec<usize> = qubits.iter().map(|&q| self.ensure(q)).collect::<Result<_, _>>()?;
        let m = self.live();
        let positions: Vec<usize> = slots.iter().copied().chain(slots.iter().map(|s| s + m)).collect();
        for rho in self.branches.values_mut() {
            apply_on_bits(rho, &positions, s);
        }
        Ok(())
    }

    fn finish(self, flips: &[u64], offset: u64, bits: usize) -> Vec<f64> {
        let mut probs = vec![0.0; 1 << bits];
        let m = self.live();
        let dim = 1usize << m;
        for (key, rho) in &self.branches {
            for r in 0..dim {
                let mut k = key ^ offset;
                for (s, &q) in self.qubit_of.iter().enumerate() {
                    if (r >> s) & 1 == 1 {
                        k ^= flips[q];
                    }
                }
                probs[k as usize] += rho[r | (r << m)].re;
            }
        }
        probs
    }
}

struct Readout {
    flips: Vec<u64>,
    offset: u64,
    nd: usize,
    no: usize,
}

fn readout(ec: &ExpandedCircuit) -> Result<Readout, OracleError> {
    let events = ec.event_paulis();
    let (nd, no) = (ec.num_detectors(), ec.num_observables());
    Distribution::point_mass(nd, no)?;
    let mut flips = vec![0u64; ec.total_qubits];
    let mut offset = 0u64;
    for (i, p) in events.iter().enumerate() {
        if (0..p.num_qubits()).any(|q| p.x_bit(q)) {
            return Err(OracleError::NotZType(p.to_string()));
        }
        if p.sign() < 0 {
            offset |= 1 << i;
        }
        for (q, f) in flips.iter_mut().enumerate() {
            if p.z_bit(q) {
                *f |= 1 << i;
            }
        }
    }
    Ok(Readout { flips, offset, nd, no })
}

/// Per-site channels on local qubits; `None` for noiseless sites.
fn site_channels(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<Vec<Option<DenseSuperoperator>>, OracleError> {
    ec.noise_sites
        .iter()
        .map(|s| {
            let g = local_generator(ec, m, s)?;
            if g.is_empty() {
                Ok(None)
            } else {
                dense_exp(&g).map(Some)
            }
        })
        .collect()
}

fn simulate(
    ec: &ExpandedCircuit,
    channels: &[Option<DenseSuperoperator>],
    last: Option<&DenseSuperoperator>,
) -> Result<Distribution, OracleError> {
    let ro = readout(ec)?;
    let n = ec.total_qubits;
    let seq = &ec.clifford_sequence;
    let mut by_position: Vec<Vec<usize>> = vec![Vec::new(); seq.len() + 1];
    for (i, s) in ec.noise_sites.iter().enumerate() {
        if channels[i].is_some() {
            by_position[s.position].push(i);
        }
    }
    // step 2p: sites at position p, step 2p + 1: clifford p
    let mut last_touch = vec![None; n];
    for (p, sites) in by_position.iter().enumerate() {
        for &i in sites {
            for &q in &ec.noise_sites[i].qubits {
                last_touch[q] = Some(2 * p);
            }
        }
        if let Some(op) = seq.get(p) {
            for &q in op.targets() {
                last_touch[q] = Some(2 * p + 1);
            }
        }
    }
    let mut st = State::new(n);
    if let Some(e) = last {
        if e.num_qubits() != n {
            return Err(OracleError::TooManyQubits { what: "final channel", qubits: e.num_qubits(), cap: n });
        }
        for q in 0..n {
            st.ensure(q)?;
        }
    }
    let retire_after = |st: &mut State, step: usize, qs: &[usize]| {
        if last.is_none() {
            for &q in qs {
                if last_touch[q] == Some(step) {
                    st.retire(q, ro.flips[q]);
                }
            }
        }
    };
    for (p, sites) in by_position.iter().enumerate() {
        for &i in sites {
            let site = &ec.noise_sites[i];
            let s = channels[i].as_ref().expect("filtered").matrix_units();
            st.apply_channel(&site.qubits, &s)?;
            retire_after(&mut st, 2 * p, &site.qubits);
        }
        if let Some(op) = seq.get(p) {
            st.apply_unitary(op.targets(), &gate_unitary(op.gate()))?;
            retire_after(&mut st, 2 * p + 1, op.targets());
        }
    }
    if let Some(e) = last {
        let all: Vec<usize> = (0..n).collect();
        st.apply_channel(&all, &e.matrix_units())?;
    }
    let probs = st.finish(&ro.flips, ro.offset, ro.nd + ro.no);
    Ok(Distribution::from_probs(ro.nd, ro.no, probs)?)
}

/// Exact detection-history distribution by density-matrix simulation of the
/// expanded circuit. Qubits join the state at their first use and are measured
/// out right after their last use.
pub fn dense_history_distribution(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<Distribution, OracleError> {
    simulate(ec, &site_channels(ec, m)?, None)
}

/// Exact distribution when every site carries a Pauli channel: each site's
/// error distribution is pushed to the end of the circuit and the resulting
/// flip distributions are XOR-convolved.
pub fn pauli_frame_distribution(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<Distribution, OracleError> {
    let channels = site_channels(ec, m)?;
    pauli_frame_from_channels(ec, &channels)
}

fn pauli_frame_from_channels(
    ec: &ExpandedCircuit,
    channels: &[Option<DenseSuperoperator>],
) -> Result<Distribution, OracleError> {
    let ro = readout(ec)?;
    let events = ec.event_paulis();
    let bits = ro.nd + ro.no;
    let mut probs = vec![0.0; 1 << bits];
    probs[0] = 1.0;
    for (i, ch) in channels.iter().enumerate() {
        let Some(ch) = ch else { continue };
        if !ch.is_pauli_diagonal(DIAGONAL_TOL) {
            return Err(OracleError::NotPauli { site: i });
        }
        let site = &ec.noise_sites[i];
        let k = site.qubits.len();
        let ops: &[CliffordOp] = &ec.clifford_sequence[site.position..];
        let mut local: BTreeMap<u64, f64> = BTreeMap::new();
        for (idx, p) in ch.pauli_probabilities().into_iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let fault = pauli_from_index(k, idx)
                .embed(ec.total_qubits, &site.qubits)
                .expect("site qubits in range");
            let fault = conjugate_sequence(ops, &fault).expect("ops in range");
            let mask = events
                .iter()
                .enumerate()
                .filter(|(_, d)| !d.commutes_unchecked(&fault))
                .fold(0u64, |acc, (b, _)| acc | (1 << b));
            *local.entry(mask).or_insert(0.0) += p;
        }
        let old = std::mem::replace(&mut probs, vec![0.0; 1 << bits]);
        for (mask, p) in &local {
            for (h, v) in old.iter().enumerate() {
                probs[h ^ *mask as usize] += p * v;
            }
        }
    }
    Ok(Distribution::from_probs(ro.nd, ro.no, probs)?)
}

/// Exact distribution of a noisy circuit: Pauli-frame convolution when every
/// site channel is Pauli-diagonal, density-matrix simulation otherwise.
pub fn exact_history_distribution(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<Distribution, OracleError> {
    let channels = site_channels(ec, m)?;
    if channels.iter().flatten().all(|c| c.is_pauli_diagonal(DIAGONAL_TOL)) {
        pauli_frame_from_channels(ec, &channels)
    } else {
        simulate(ec, &channels, None)
    }
}

/// Distribution of the noiseless circuit followed by `exp(g)` on the whole
/// expanded register.
pub fn distribution_after_generator(ec: &ExpandedCircuit, g: &SparseGenerator) -> Result<Distribution, OracleError> {
    let e = dense_exp(g)?;
    let none = vec![None; ec.noise_sites.len()];
    simulate(ec, &none, Some(&e))
}
