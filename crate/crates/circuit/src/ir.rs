use std::fmt;

use demforge_pauli::Gate;

/// Instruction kinds. `I` is an explicit idle slot that only carries noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Gate(Gate),
    I,
    R,
    M,
    MR,
}

impl OpKind {
    pub fn arity(self) -> usize {
        match self {
            OpKind::Gate(g) => g.arity(),
            _ => 1,
        }
    }

    /// Label used by error models and the text format.
    pub fn label(self) -> &'static str {
        match self {
            OpKind::Gate(g) => g.name(),
            OpKind::I => "I",
            OpKind::R => "R",
            OpKind::M => "M",
            OpKind::MR => "MR",
        }
    }

    pub fn from_label(s: &str) -> Option<OpKind> {
        match s {
            "I" => Some(OpKind::I),
            "R" => Some(OpKind::R),
            "M" => Some(OpKind::M),
            "MR" => Some(OpKind::MR),
            _ => Gate::from_name(s).map(OpKind::Gate),
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, OpKind::M | OpKind::MR)
    }
}

/// One gate instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub kind: OpKind,
    pub targets: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layer {
    pub ops: Vec<Operation>,
}

impl Layer {
    pub fn touches(&self, q: usize) -> bool {
        self.ops.iter().any(|op| op.targets.contains(&q))
    }
}

/// Layered circuit. Detector and observable entries hold absolute
/// measurement-record indices (0 = first measurement of the circuit).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub layers: Vec<Layer>,
    pub detectors: Vec<Vec<usize>>,
    pub observables: Vec<Vec<usize>>,
}

impl Circuit {
    pub fn num_measurements(&self) -> usize {
        self.operations()
            .filter(|op| op.kind.is_measurement())
            .count()
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    pub fn operations(&self) -> impl Iterator<Item = &Operation> {
        self.layers.iter().flat_map(|l| l.ops.iter())
    }

    pub fn has_mid_circuit_measurements(&self) -> bool {
        let ops: Vec<&Operation> = self.operations().collect();
        ops.iter().enumerate().any(|(i, op)| {
            op.kind.is_measurement() && ops[i + 1..].iter().any(|o| o.targets.contains(&op.targets[0]))
        })
    }

    /// Canonical text form; `parse_circuit` of the result reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                out.push_str("TICK\n");
            }
            for op in &layer.ops {
                out.push_str(op.kind.label());
                for t in &op.targets {
                    out.push_str(&format!(" {t}"));
                }
                out.push('\n');
            }
        }
        let total = self.num_measurements();
        let recs = |r: &[usize]| -> String {
            r.iter()
                .map(|&m| format!(" rec[-{}]", total - m))
                .collect::<String>()
        };
        for d in &self.detectors {
            out.push_str(&format!("DETECTOR{}\n", recs(d)));
        }
        for (i, o) in self.observables.iter().enumerate() {
            out.push_str(&format!("OBSERVABLE_INCLUDE({i}){}\n", recs(o)));
        }
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
