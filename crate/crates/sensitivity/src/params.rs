use std::collections::BTreeMap;
use std::fmt;

use demforge_circuit::{ExpandedCircuit, SiteKind};
use demforge_errgen::{propagate_eeg, Eeg, ErrorModel, GateNoise, Sector, SparseGenerator};
use demforge_pauli::Pauli;

use crate::SensitivityError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Pre,
    Post,
}

/// One θ entry per (gate label, side, EEG), shared by every location of the
/// gate, or one per noise site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Granularity {
    #[default]
    PerGate,
    PerLocation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub label: String,
    pub side: Side,
    /// Noise-site index for per-location parameters.
    pub site: Option<usize>,
    /// H generator on the instruction's own qubits.
    pub eeg: Eeg,
    pub value: f64,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Pre => "pre",
            Side::Post => "post",
        };
        match self.site {
            Some(s) => write!(f, "{}@{}:{}:{}", self.label, s, side, self.eeg),
            None => write!(f, "{}:{}:{}", self.label, side, self.eeg),
        }
    }
}

/// The θ vector: H terms of a model in binding order (label, pre before post,
/// EEG order). Non-H terms are not parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    pub granularity: Granularity,
    pub entries: Vec<Parameter>,
}

fn side_generator(b: &GateNoise, side: Side) -> &SparseGenerator {
    match side {
        Side::Pre => &b.pre,
        Side::Post => &b.post,
    }
}

fn site_side(kind: SiteKind) -> Option<Side> {
    match kind {
        SiteKind::Pre => Some(Side::Pre),
        SiteKind::Post => Some(Side::Post),
        SiteKind::MeasureFlip | SiteKind::PrepFlip => None,
    }
}

impl ParameterVector {
    pub fn from_model(ec: &ExpandedCircuit, m: &ErrorModel, granularity: Granularity) -> Result<Self, SensitivityError> {
        let mut entries = Vec::new();
        match granularity {
            Granularity::PerGate => {
                for (label, b) in &m.bindings {
                    for side in [Side::Pre, Side::Post] {
                        for (e, r) in side_generator(b, side).iter() {
                            if e.sector() == Sector::H {
                                entries.push(Parameter {
                                    label: label.clone(),
                                    side,
                                    site: None,
                                    eeg: e.clone(),
                                    value: r,
                                });
                            }
                        }
                    }
                }
            }
            Granularity::PerLocation => {
                for (i, site) in ec.noise_sites.iter().enumerate() {
                    let Some(side) = site_side(site.kind) else { continue };
                    let Some(b) = m.binding(site.label, site.qubits.len())? else { continue };
                    for (e, r) in side_generator(b, side).iter() {
                        if e.sector() == Sector::H {
                            entries.push(Parameter {
                                label: site.label.to_string(),
                                side,
                                site: Some(i),
                                eeg: e.clone(),
                                value: r,
                            });
                        }
                    }
                }
            }
        }
        Ok(ParameterVector { granularity, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|p| p.value).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|p| p.to_string()).collect()
    }

    pub fn check_len(&self, theta: &[f64]) -> Result<(), SensitivityError> {
        if theta.len() != self.len() {
            return Err(SensitivityError::Length { expected: self.len(), got: theta.len() });
        }
        Ok(())
    }

    /// `base` with every parametrized H rate replaced by the matching θ entry.
    pub fn to_model(&self, base: &ErrorModel, theta: &[f64]) -> Result<ErrorModel, SensitivityError> {
        if self.granularity == Granularity::PerLocation {
            return Err(SensitivityError::PerLocationModel);
        }
        self.check_len(theta)?;
        let mut m = base.clone();
        for (p, &t) in self.entries.iter().zip(theta) {
            let b = m.bindings.get_mut(&p.label).expect("parameters come from the model");
            let g = match p.side {
                Side::Pre => &mut b.pre,
                Side::Post => &mut b.post,
            };
            let mut next = g.filtered(|e, _| e != &p.eeg);
            next.add(p.eeg.clone(), t);
            *g = next;
        }
        Ok(m)
    }

    fn index(&self) -> BTreeMap<(Option<usize>, &str, Side, &Eeg), usize> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, p)| ((p.site, p.label.as_str(), p.side, &p.eeg), i))
            .collect()
    }
}

/// Circuit-level H index `Q` → `s_Q`, with `φ_Q = s_Qᵀθ`.
pub type PropagationMap = BTreeMap<Eeg, Vec<f64>>;

/// Pushes every parametrized H term to the end of the circuit. Terms touching
/// qubits that are not live at the site are dropped, as in the circuit error
/// generator.
pub fn propagation_map(ec: &ExpandedCircuit, params: &ParameterVector) -> PropagationMap {
    let index = params.index();
    let n = ec.total_qubits;
    let mut out: PropagationMap = BTreeMap::new();
    for (i, site) in ec.noise_sites.iter().enumerate() {
        let Some(side) = site_side(site.kind) else { continue };
        let key_site = match params.granularity {
            Granularity::PerGate => None,
            Granularity::PerLocation => Some(i),
        };
        let ops = &ec.clifford_sequence[site.position..];
        for p in params.entries.iter().filter(|p| p.label == site.label && p.side == side && p.site == key_site) {
            if p.eeg.num_qubits() != site.qubits.len() {
                continue;
            }
            let local = p.eeg.p();
            let dead = site
                .qubits
                .iter()
                .zip(&site.active)
                .enumerate()
                .any(|(j, (_, &a))| !a && local.get(j) != Pauli::I);
            if dead {
                continue;
            }
            let mut one = SparseGenerator::new(local.num_qubits());
            one.add(p.eeg.clone(), 1.0);
            let embedded = one.embed(n, &site.qubits);
            let (e, _) = embedded.iter().next().expect("one term");
            let (q, f) = propagate_eeg(e, ops);
            let j = index[&(p.site, p.label.as_str(), p.side, &p.eeg)];
            out.entry(q).or_insert_with(|| vec![0.0; params.len()])[j] += f;
        }
    }
    out
}

/// `φ_Q = s_Qᵀθ` for every circuit H index.
pub fn circuit_rates(map: &PropagationMap, theta: &[f64]) -> BTreeMap<Eeg, f64> {
    map.iter()
        .map(|(q, s)| (q.clone(), s.iter().zip(theta).map(|(a, b)| a * b).sum()))
        .collect()
}
