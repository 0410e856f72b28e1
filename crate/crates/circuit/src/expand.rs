use demforge_pauli::{CliffordOp, Gate, Pauli, PauliString, StabilizerTableau};
use thiserror::Error;

use crate::ir::{Circuit, OpKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("invalid circuit: {0}")]
    Invalid(String),
    #[error("{what} {index} is not deterministic in the noiseless circuit")]
    NonDeterministic { what: &'static str, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKind {
    /// Channel right before the instruction.
    Pre,
    /// Channel right after the instruction.
    Post,
    /// Classical flip of a measurement record, as an X channel on the record qubit.
    MeasureFlip,
    /// Imperfect reset, as an X channel right after the reset.
    PrepFlip,
}

/// Where a gate-level channel acts in the expanded circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseSite {
    /// The channel acts after `clifford_sequence[..position]`.
    pub position: usize,
    /// Index of the instruction in the flattened circuit.
    pub op_index: usize,
    pub layer: usize,
    /// Instruction label (`CX`, `M`, ...) used to look up the model binding.
    pub label: &'static str,
    pub kind: SiteKind,
    /// Expanded-register qubits, in instruction target order.
    pub qubits: Vec<usize>,
    /// Per entry of `qubits`: whether the qubit can still influence a record.
    pub active: Vec<bool>,
}

/// Measurement-free equivalent of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedCircuit {
    pub base: Circuit,
    pub total_qubits: usize,
    pub clifford_sequence: Vec<CliffordOp>,
    /// Z-type, sign folded so the ideal expectation is +1.
    pub detector_paulis: Vec<PauliString>,
    pub observable_paulis: Vec<PauliString>,
    pub noise_sites: Vec<NoiseSite>,
    /// Expanded qubit holding each measurement record.
    pub record_qubits: Vec<usize>,
}

impl ExpandedCircuit {
    pub fn num_detectors(&self) -> usize {
        self.detector_paulis.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observable_paulis.len()
    }

    /// Detectors followed by observables, the bit order of event keys.
    pub fn event_paulis(&self) -> Vec<PauliString> {
        self.detector_paulis
            .iter()
            .chain(&self.observable_paulis)
            .cloned()
            .collect()
    }
}

/// Defers every mid-circuit measurement onto a fresh virtual qubit.
///
/// `M q` becomes `CX q v`; `MR q` becomes `CX q v; CX v q`, which leaves `q`
/// in `|0>`. A measurement with no later instruction on its qubit reads the
/// qubit itself. `R q` on a used qubit swaps it with an unused virtual qubit.
pub fn expand(c: &Circuit) -> Result<ExpandedCircuit, ExpandError> {
    let n = c.num_qubits;
    let ops: Vec<(usize, &crate::ir::Operation)> = c
        .layers
        .iter()
        .enumerate()
        .flat_map(|(li, l)| l.ops.iter().map(move |op| (li, op)))
        .collect();

    let mut last = vec![None; n];
    for (i, (_, op)) in ops.iter().enumerate() {
        for &q in &op.targets {
            if q >= n {
                return Err(ExpandError::Invalid(format!("qubit {q} beyond {n} qubits")));
            }
            last[q] = Some(i);
        }
    }

    let mut seq: Vec<CliffordOp> = Vec::new();
    let mut sites = Vec::new();
    let mut records = Vec::new();
    let mut fresh = vec![true; n];
    let mut inactive = vec![false; n];
    let mut next_virtual = n;
    let cop = |g: Gate, t: &[usize]| CliffordOp::new(g, t).expect("valid targets");

    for (i, &(layer, op)) in ops.iter().enumerate() {
        let label = op.kind.label();
        let t = &op.targets;
        sites.push(NoiseSite {
            position: seq.len(),
            op_index: i,
            layer,
            label,
            kind: SiteKind::Pre,
            qubits: t.clone(),
            // anything right before a reset is wiped by it
            active: vec![op.kind != OpKind::R; t.len()],
        });
        let single = |kind, q| NoiseSite {
            position: 0,
            op_index: i,
            layer,
            label,
            kind,
            qubits: vec![q],
            active: vec![true],
        };
        match op.kind {
            OpKind::Gate(g) => seq.push(cop(g, t)),
            OpKind::I => {}
            OpKind::R => {
                let q = t[0];
                if !fresh[q] {
                    seq.push(cop(Gate::Swap, &[q, next_virtual]));
                    next_virtual += 1;
                }
                sites.push(NoiseSite {
                    position: seq.len(),
                    ..single(SiteKind::PrepFlip, q)
                });
            }
            OpKind::M | OpKind::MR => {
                let q = t[0];
                if last[q] == Some(i) {
                    records.push(q);
                    sites.push(NoiseSite {
                        position: seq.len(),
                        ..single(SiteKind::MeasureFlip, q)
                    });
                    inactive[q] = true;
                } else {
                    let v = next_virtual;
                    next_virtual += 1;
                    seq.push(cop(Gate::CX, &[q, v]));
                    if op.kind == OpKind::MR {
                        seq.push(cop(Gate::CX, &[v, q]));
                        sites.push(NoiseSite {
                            position: seq.len(),
                            ..single(SiteKind::PrepFlip, q)
                        });
                    }
                    records.push(v);
                    sites.push(NoiseSite {
                        position: seq.len(),
                        ..single(SiteKind::MeasureFlip, v)
                    });
                }
            }
        }
        for &q in t {
            fresh[q] = false;
        }
        sites.push(NoiseSite {
            position: seq.len(),
            op_index: i,
            layer,
            label,
            kind: SiteKind::Post,
            qubits: t.clone(),
            active: t.iter().map(|&q| !inactive[q]).collect(),
        });
    }

    let total = next_virtual;
    let mut tab = StabilizerTableau::new(total);
    tab.apply_all(&seq).expect("targets in range");

    let build = |recs: &[usize], what: &'static str, index: usize| -> Result<PauliString, ExpandError> {
        let mut p = PauliString::identity(total);
        for &r in recs {
            let q = *records
                .get(r)
                .ok_or_else(|| ExpandError::Invalid(format!("{what} {index} refers to missing record {r}")))?;
            let cur = p.get(q);
            p.set(q, if cur == Pauli::Z { Pauli::I } else { Pauli::Z })
                .expect("in range");
        }
        match tab.expectation(&p) {
            1 => Ok(p),
            -1 => {
                p.negate();
                Ok(p)
            }
            _ => Err(ExpandError::NonDeterministic { what, index }),
        }
    };
    let detector_paulis = c
        .detectors
        .iter()
        .enumerate()
        .map(|(i, d)| build(d, "detector", i))
        .collect::<Result<Vec<_>, _>>()?;
    let observable_paulis = c
        .observables
        .iter()
        .enumerate()
        .map(|(i, o)| build(o, "observable", i))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ExpandedCircuit {
        base: c.clone(),
        total_qubits: total,
        clifford_sequence: seq,
        detector_paulis,
        observable_paulis,
        noise_sites: sites,
        record_qubits: records,
    })
}

/// Noiseless end-of-circuit state of the expanded circuit.
pub fn ideal_final_state(ec: &ExpandedCircuit) -> StabilizerTableau {
    let mut tab = StabilizerTableau::new(ec.total_qubits);
    tab.apply_all(&ec.clifford_sequence)
        .expect("expanded circuit targets are in range");
    tab
}
