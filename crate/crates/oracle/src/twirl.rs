use std::collections::BTreeMap;

use demforge_circuit::ExpandedCircuit;
use demforge_dem::{DemEventKey, DetectorErrorModel};
use demforge_errgen::{site_generator, Eeg, ErrorModel, GateNoise, Sector, SparseGenerator, CANCELLATION_TOLERANCE};
use demforge_pauli::conjugate_sequence;

use crate::dense::pauli_from_index;
use crate::superop::dense_exp;
use crate::OracleError;

/// A Pauli channel on `num_qubits` qubits, indexed like [`crate::pauli_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    pub num_qubits: usize,
    /// Error probabilities, summing to one.
    pub probabilities: Vec<f64>,
    /// The same channel as commuting `S_P` generators: `exp(Σ_P s_P S_P)`.
    /// Rates may be negative when the channel is not CP-divisible.
    pub rates: SparseGenerator,
}

fn anticommute(a: usize, b: usize) -> bool {
    // symplectic form on base-4 digits I, X, Y, Z
    let mut odd = false;
    let (mut a, mut b) = (a, b);
    while a != 0 && b != 0 {
        let (x, y) = (a & 3, b & 3);
        if x != 0 && y != 0 && x != y {
            odd = !odd;
        }
        a >>= 2;
        b >>= 2;
    }
    odd
}

/// Diagonal projection of `exp(g)`. A purely stochastic `g` is already a
/// Pauli channel and its rates pass through unchanged.
pub fn twirl_generator(g: &SparseGenerator) -> Result<PauliChannel, OracleError> {
    let k = g.num_qubits();
    let e = dense_exp(g)?;
    let probabilities = e.pauli_probabilities();
    if g.has_only(Sector::S) {
        return Ok(PauliChannel { num_qubits: k, probabilities, rates: g.clone() });
    }
    let fid = e.pauli_fidelities();
    let mut logs = Vec::with_capacity(fid.len());
    for (r, &f) in fid.iter().enumerate() {
        if f <= 0.0 {
            return Err(OracleError::NonPositiveFidelity { pauli: pauli_from_index(k, r).to_string(), value: f });
        }
        logs.push(f.ln());
    }
    let scale = logs.iter().map(|l| l.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let norm = 1.0 / fid.len() as f64;
    let mut rates = SparseGenerator::new(k);
    for p in 1..fid.len() {
        let s: f64 = logs
            .iter()
            .enumerate()
            .map(|(r, l)| if anticommute(p, r) { -l } else { *l })
            .sum::<f64>()
            * norm;
        if s.abs() > CANCELLATION_TOLERANCE * scale {
            rates.add(Eeg::s(pauli_from_index(k, p)), s);
        }
    }
    Ok(PauliChannel { num_qubits: k, probabilities, rates })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirledGate {
    pub pre: PauliChannel,
    pub post: PauliChannel,
}

/// An error model with every binding replaced by its Pauli twirl.
#[derive(Debug, Clone, PartialEq)]
pub struct TwirledModel {
    pub gates: BTreeMap<String, TwirledGate>,
    pub measure_flip: f64,
    pub prep_flip: f64,
    pub source: ErrorModel,
}

impl TwirledModel {
    /// The twirled channels as a purely stochastic error model.
    pub fn to_stochastic_model(&self) -> ErrorModel {
        let mut m = ErrorModel {
            measure_flip: self.measure_flip,
            prep_flip: self.prep_flip,
            unbound: self.source.unbound,
            ..Default::default()
        };
        for (label, g) in &self.gates {
            m.bindings
                .insert(label.clone(), GateNoise { pre: g.pre.rates.clone(), post: g.post.rates.clone() });
        }
        m
    }
}

pub fn pauli_twirl(m: &ErrorModel) -> Result<TwirledModel, OracleError> {
    let mut gates = BTreeMap::new();
    for (label, b) in &m.bindings {
        gates.insert(label.clone(), TwirledGate { pre: twirl_generator(&b.pre)?, post: twirl_generator(&b.post)? });
    }
    Ok(TwirledModel { gates, measure_flip: m.measure_flip, prep_flip: m.prep_flip, source: m.clone() })
}

/// DEM of a purely stochastic model by Pauli-frame propagation: every `S_P`
/// fault is pushed to the end of the circuit, rates landing on the same Pauli
/// add, and each event fires with `½(1 − e^{−2Σs})` over its Paulis.
pub fn stochastic_dem(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<DetectorErrorModel, OracleError> {
    let n = ec.total_qubits;
    let events = ec.event_paulis();
    let (nd, no) = (ec.num_detectors(), ec.num_observables());
    let mut total = SparseGenerator::new(n);
    for site in &ec.noise_sites {
        let g = site_generator(ec, m, site)?;
        let ops = &ec.clifford_sequence[site.position..];
        for (e, s) in g.iter() {
            if e.sector() != Sector::S {
                return Err(OracleError::NotStochastic(e.to_string()));
            }
            let p = conjugate_sequence(ops, e.p()).expect("ops fit the register").with_phase(0);
            total.add(Eeg::s(p), s);
        }
    }
    let mut sums: BTreeMap<DemEventKey, f64> = BTreeMap::new();
    for (e, s) in total.iter() {
        let mut key = DemEventKey::new(nd, no);
        for (i, d) in events.iter().enumerate() {
            if !d.commutes_unchecked(e.p()) {
                key.toggle_bit(i);
            }
        }
        if !key.is_empty() {
            *sums.entry(key).or_insert(0.0) += s;
        }
    }
    let mut dem = DetectorErrorModel::new(nd, no);
    for (k, s) in sums {
        let p = 0.5 * (1.0 - (-2.0 * s).exp());
        if p != 0.0 {
            dem.insert(k, p)?;
        }
    }
    Ok(dem)
}

/// DEM of the Pauli-twirled model, the standard incoherent baseline.
pub fn twirled_dem(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<DetectorErrorModel, OracleError> {
    stochastic_dem(ec, &pauli_twirl(m)?.to_stochastic_model())
}
