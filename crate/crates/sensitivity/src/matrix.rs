use std::fmt::{self, Write};

use demforge_build::{composed_beta, delta, representative};
use demforge_circuit::{ideal_final_state, ExpandedCircuit};
use demforge_dem::DemEventKey;
use demforge_errgen::{Eeg, SparseGenerator};
use demforge_pauli::{PauliString, StabilizerTableau};
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::params::{propagation_map, ParameterVector, PropagationMap};
use crate::SensitivityError;

#[derive(Debug, Clone, PartialEq)]
pub enum SensitivityTarget {
    /// Product of the flagged detector (and observable) Paulis.
    Detectors(DemEventKey),
    Event(DemEventKey),
    /// Probability that any leading-order event fires a detector.
    Discard,
}

impl fmt::Display for SensitivityTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SensitivityTarget::Detectors(k) => write!(f, "expectation {k}"),
            SensitivityTarget::Event(k) => write!(f, "event {k}"),
            SensitivityTarget::Discard => write!(f, "discard"),
        }
    }
}

/// Symmetric matrix of a quadratic form in θ. For detector targets
/// `⟨P⟩ ≈ 1 + θᵀMθ`; for events and discards `p ≈ −½ θᵀMθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityMatrix {
    pub target: SensitivityTarget,
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
}

impl SensitivityMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn quadratic_form(&self, theta: &[f64]) -> f64 {
        assert_eq!(theta.len(), self.dim(), "θ length");
        let t = nalgebra::DVector::from_column_slice(theta);
        t.dot(&(&self.matrix * &t))
    }

    /// Leading-order value of the target at θ.
    pub fn evaluate(&self, theta: &[f64]) -> f64 {
        match self.target {
            SensitivityTarget::Detectors(_) => 1.0 + self.quadratic_form(theta),
            _ => -0.5 * self.quadratic_form(theta),
        }
    }

    /// Tab-separated text: a `# target` line, a `# theta` header naming the
    /// parameters in order, then one row per parameter.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# target\t{}", self.target).unwrap();
        writeln!(out, "# theta\t{}", self.labels.join("\t")).unwrap();
        for (i, label) in self.labels.iter().enumerate() {
            out.push_str(label);
            for j in 0..self.dim() {
                write!(out, "\t{:e}", self.matrix[(i, j)]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    fn add(&mut self, other: &SensitivityMatrix) {
        self.matrix += &other.matrix;
    }
}

fn single(q: &Eeg) -> SparseGenerator {
    let mut g = SparseGenerator::new(q.num_qubits());
    g.add(q.clone(), 1.0);
    g
}

/// `Σ_{Q,Q'} ½ β_P(H_Q∘H_Q') s_Q s_Q'ᵀ`, symmetrized.
fn quadratic(
    terms: &[(&Eeg, &Vec<f64>)],
    state: &StabilizerTableau,
    rep: &PauliString,
    dim: usize,
) -> DMatrix<f64> {
    let gens: Vec<SparseGenerator> = terms.iter().map(|(q, _)| single(q)).collect();
    let rows: Vec<DMatrix<f64>> = (0..terms.len())
        .into_par_iter()
        .map(|a| {
            let mut m = DMatrix::zeros(dim, dim);
            for b in 0..terms.len() {
                let beta = composed_beta(state, &gens[a], &gens[b], rep);
                if beta == 0.0 {
                    continue;
                }
                let (sa, sb) = (terms[a].1, terms[b].1);
                for i in 0..dim {
                    if sa[i] == 0.0 {
                        continue;
                    }
                    for j in 0..dim {
                        m[(i, j)] += 0.5 * beta * sa[i] * sb[j];
                    }
                }
            }
            m
        })
        .collect();
    let mut m = DMatrix::zeros(dim, dim);
    for r in &rows {
        m += r;
    }
    (&m + m.transpose()) * 0.5
}

fn check_shape(ec: &ExpandedCircuit, key: &DemEventKey) -> Result<(), SensitivityError> {
    let expected = ec.num_detectors() + ec.num_observables();
    if key.num_bits() != expected || key.num_detectors() != ec.num_detectors() {
        return Err(SensitivityError::Shape { expected, got: key.num_bits() });
    }
    Ok(())
}

struct Setup {
    map: PropagationMap,
    state: StabilizerTableau,
    events: Vec<PauliString>,
}

fn setup(ec: &ExpandedCircuit, params: &ParameterVector) -> Setup {
    Setup { map: propagation_map(ec, params), state: ideal_final_state(ec), events: ec.event_paulis() }
}

/// `M_P` with `⟨P⟩ ≈ 1 + θᵀ M_P θ` for the product `P` of the detectors and
/// observables flagged in `target`.
pub fn detector_sensitivity(
    ec: &ExpandedCircuit,
    params: &ParameterVector,
    target: &DemEventKey,
) -> Result<SensitivityMatrix, SensitivityError> {
    check_shape(ec, target)?;
    let s = setup(ec, params);
    let mut rep = PauliString::identity(ec.total_qubits);
    for (i, e) in s.events.iter().enumerate() {
        if target.bit(i) {
            rep = rep.mul_unchecked(e);
        }
    }
    if target.is_empty() || !rep.is_hermitian() || s.state.expectation(&rep) != 1 {
        return Err(SensitivityError::InvalidTarget(target.to_string()));
    }
    let terms: Vec<(&Eeg, &Vec<f64>)> = s.map.iter().collect();
    Ok(SensitivityMatrix {
        target: SensitivityTarget::Detectors(target.clone()),
        labels: params.labels(),
        matrix: quadratic(&terms, &s.state, &rep, params.len()),
    })
}

fn event_matrix(ec: &ExpandedCircuit, params: &ParameterVector, s: &Setup, event: &DemEventKey) -> Option<DMatrix<f64>> {
    let nd = ec.num_detectors();
    let terms: Vec<(&Eeg, &Vec<f64>)> = s.map.iter().filter(|(q, _)| &delta(q.p(), &s.events, nd) == event).collect();
    if terms.is_empty() {
        return None;
    }
    let rep = representative(event, &s.events);
    Some(quadratic(&terms, &s.state, rep, params.len()))
}

/// `M_E` with `p_E ≈ −½ θᵀ M_E θ`, from the H terms of class `E` only.
pub fn event_sensitivity(
    ec: &ExpandedCircuit,
    params: &ParameterVector,
    event: &DemEventKey,
) -> Result<SensitivityMatrix, SensitivityError> {
    check_shape(ec, event)?;
    let s = setup(ec, params);
    let matrix = event_matrix(ec, params, &s, event).ok_or_else(|| SensitivityError::UnknownEvent(event.to_string()))?;
    Ok(SensitivityMatrix { target: SensitivityTarget::Event(event.clone()), labels: params.labels(), matrix })
}

/// Sum of the event matrices over every leading-order event that flips at
/// least one detector, so `p_discard ≈ −½ θᵀMθ`.
pub fn discard_sensitivity(ec: &ExpandedCircuit, params: &ParameterVector) -> SensitivityMatrix {
    let s = setup(ec, params);
    let nd = ec.num_detectors();
    let mut keys: Vec<DemEventKey> = s.map.keys().map(|q| delta(q.p(), &s.events, nd)).collect();
    keys.sort();
    keys.dedup();
    let mut total = SensitivityMatrix {
        target: SensitivityTarget::Discard,
        labels: params.labels(),
        matrix: DMatrix::zeros(params.len(), params.len()),
    };
    for k in keys.iter().filter(|k| (0..nd).any(|i| k.detector(i))) {
        if let Some(m) = event_matrix(ec, params, &s, k) {
            total.add(&SensitivityMatrix { target: SensitivityTarget::Discard, labels: Vec::new(), matrix: m });
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Granularity;
    use demforge_circuit::{expand, parse_circuit};
    use demforge_errgen::{ErrorModel, GateNoise};

    fn one_qubit(terms: &[(&str, f64)]) -> (ExpandedCircuit, ErrorModel) {
        let ec = expand(&parse_circuit("I 0\nTICK\nM 0\nDETECTOR rec[-1]\n").unwrap()).unwrap();
        let mut g = SparseGenerator::new(1);
        for (p, r) in terms {
            g.add(Eeg::h(p.parse().unwrap()), *r);
        }
        let mut m = ErrorModel::noiseless();
        m.bind("I", GateNoise::post_only(g)).unwrap();
        (ec, m)
    }

    #[test]
    fn rotation_before_a_detector() {
        let (ec, m) = one_qubit(&[("X", 0.01)]);
        let params = ParameterVector::from_model(&ec, &m, Granularity::PerGate).unwrap();
        let d = DemEventKey::from_mask(1, 0, 1);
        let s = detector_sensitivity(&ec, &params, &d).unwrap();
        assert_eq!(s.matrix[(0, 0)], -2.0);
        let e = event_sensitivity(&ec, &params, &d).unwrap();
        assert_eq!(e.matrix, s.matrix);
        assert!((e.evaluate(&[0.01]) - 1e-4).abs() < 1e-18);
        assert_eq!(discard_sensitivity(&ec, &params).matrix, e.matrix);
    }

    #[test]
    fn z_rotation_is_invisible() {
        let (ec, m) = one_qubit(&[("Z", 0.01)]);
        let params = ParameterVector::from_model(&ec, &m, Granularity::PerGate).unwrap();
        let s = detector_sensitivity(&ec, &params, &DemEventKey::from_mask(1, 0, 1)).unwrap();
        assert_eq!(s.matrix[(0, 0)], 0.0);
        assert!(matches!(
            event_sensitivity(&ec, &params, &DemEventKey::from_mask(1, 0, 1)),
            Err(SensitivityError::UnknownEvent(_))
        ));
    }

    #[test]
    fn bad_targets() {
        let (ec, m) = one_qubit(&[("X", 0.01)]);
        let params = ParameterVector::from_model(&ec, &m, Granularity::PerGate).unwrap();
        assert!(matches!(
            detector_sensitivity(&ec, &params, &DemEventKey::from_mask(1, 0, 0)),
            Err(SensitivityError::InvalidTarget(_))
        ));
        assert!(matches!(
            detector_sensitivity(&ec, &params, &DemEventKey::from_mask(2, 0, 1)),
            Err(SensitivityError::Shape { .. })
        ));
    }

    #[test]
    fn text_export_has_header() {
        let (ec, m) = one_qubit(&[("X", 0.01), ("Y", 0.02)]);
        let params = ParameterVector::from_model(&ec, &m, Granularity::PerGate).unwrap();
        let s = detector_sensitivity(&ec, &params, &DemEventKey::from_mask(1, 0, 1)).unwrap();
        let text = s.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "# theta\tI:post:H_X\tI:post:H_Y");
        assert!(lines[2].starts_with("I:post:H_X\t-2e0"));
    }
}
