use std::collections::BTreeMap;
use std::fmt::Write;

use demforge_circuit::OpKind;
use demforge_pauli::{Pauli, PauliString};
use serde_yaml::Value;
use thiserror::Error;

use crate::eeg::{EegError, Sector};
use crate::generator::SparseGenerator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("no error-model binding for instruction {0}")]
    MissingBinding(String),
    #[error("binding for {label} acts on {got} qubits, instruction has {expected}")]
    Arity {
        label: String,
        expected: usize,
        got: usize,
    },
    #[error("flip probability {0} outside [0, 0.5)")]
    FlipProbability(f64),
    #[error("model file: {0}")]
    Format(String),
    #[error("infeasible random model: {0}")]
    InfeasibleSpec(String),
    #[error(transparent)]
    Eeg(#[from] EegError),
}

/// What to do with instructions that have no binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnboundPolicy {
    #[default]
    Error,
    Ideal,
}

/// Channels before and after one instruction, on the instruction's own qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateNoise {
    pub pre: SparseGenerator,
    pub post: SparseGenerator,
}

impl GateNoise {
    pub fn post_only(post: SparseGenerator) -> Self {
        GateNoise {
            pre: SparseGenerator::new(post.num_qubits()),
            post,
        }
    }

    pub fn arity(&self) -> usize {
        self.post.num_qubits()
    }
}

/// Gate-level noise model keyed by instruction label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorModel {
    pub bindings: BTreeMap<String, GateNoise>,
    /// Probability that a measurement record is flipped.
    pub measure_flip: f64,
    /// Probability that a reset leaves `|1>`.
    pub prep_flip: f64,
    pub unbound: UnboundPolicy,
}

/// Rate `s` of `S_X` with flip probability `p`: `p = ½(1 − e^{−2s})`.
pub fn flip_rate(p: f64) -> Result<f64, ModelError> {
    if !(0.0..0.5).contains(&p) {
        return Err(ModelError::FlipProbability(p));
    }
    Ok(-0.5 * (1.0 - 2.0 * p).ln())
}

impl ErrorModel {
    pub fn noiseless() -> Self {
        ErrorModel {
            unbound: UnboundPolicy::Ideal,
            ..Default::default()
        }
    }

    pub fn bind(&mut self, label: &str, noise: GateNoise) -> Result<(), ModelError> {
        if let Some(kind) = OpKind::from_label(label) {
            let a = kind.arity();
            for g in [&noise.pre, &noise.post] {
                if g.num_qubits() != a {
                    return Err(ModelError::Arity {
                        label: label.to_string(),
                        expected: a,
                        got: g.num_qubits(),
                    });
                }
            }
        }
        self.bindings.insert(label.to_string(), noise);
        Ok(())
    }

    /// Binding for `label` on `arity` qubits, or `None` when unbound and allowed.
    pub fn binding(&self, label: &str, arity: usize) -> Result<Option<&GateNoise>, ModelError> {
        match self.bindings.get(label) {
            Some(b) if b.pre.num_qubits() != arity || b.post.num_qubits() != arity => Err(ModelError::Arity {
                label: label.to_string(),
                expected: arity,
                got: b.post.num_qubits(),
            }),
            Some(b) => Ok(Some(b)),
            None if self.unbound == UnboundPolicy::Ideal => Ok(None),
            None => Err(ModelError::MissingBinding(label.to_string())),
        }
    }

    /// Multiplies every rate: H by `sqrt(f)`, S/C/A by `f`, so the generator
    /// infidelity of every binding scales by `f`. Flip probabilities scale linearly.
    pub fn scaled_infidelity(&self, f: f64) -> ErrorModel {
        let scale = |g: &SparseGenerator| {
            let mut out = SparseGenerator::new(g.num_qubits());
            for (e, r) in g.iter() {
                let k = if e.sector() == Sector::H { f.sqrt() } else { f };
                out.add(e.clone(), k * r);
            }
            out
        };
        ErrorModel {
            bindings: self
                .bindings
                .iter()
                .map(|(k, b)| {
                    (
                        k.clone(),
                        GateNoise {
                            pre: scale(&b.pre),
                            post: scale(&b.post),
                        },
                    )
                })
                .collect(),
            measure_flip: self.measure_flip * f,
            prep_flip: self.prep_flip * f,
            unbound: self.unbound,
        }
    }

    /// True when every bound term is stochastic.
    pub fn is_stochastic_only(&self) -> bool {
        self.bindings
            .values()
            .all(|b| b.pre.has_only(Sector::S) && b.post.has_only(Sector::S))
    }

    pub fn is_cptp(&self, tol: f64) -> bool {
        self.bindings
            .values()
            .all(|b| b.pre.is_cptp(tol) && b.post.is_cptp(tol))
    }

    /// Parses the YAML model format:
    ///
    /// ```yaml
    /// unbound: ideal          # or error (default)
    /// measure_flip: 0.001
    /// prep_flip: 0.001
    /// CZ: [{sector: H, paulis: [ZZ], rate: 0.0245}, {sector: S, paulis: [IZ], rate: 3.0e-4}]
    /// M:
    ///   pre: [{sector: S, paulis: [X], rate: 0.001}]
    /// ```
    ///
    /// A bare list binds the post-instruction channel. Character `k` of a Pauli
    /// label acts on the instruction's `k`-th target.
    pub fn from_yaml(text: &str) -> Result<ErrorModel, ModelError> {
        let fmt_err = |m: String| ModelError::Format(m);
        let doc: Value = serde_yaml::from_str(text).map_err(|e| fmt_err(e.to_string()))?;
        let mut model = ErrorModel::default();
        let map = match doc {
            Value::Null => return Ok(model),
            Value::Mapping(m) => m,
            _ => return Err(fmt_err("top level must be a mapping".into())),
        };
        for (k, v) in map {
            let key = k.as_str().ok_or_else(|| fmt_err("keys must be strings".into()))?;
            match key {
                "measure_flip" | "prep_flip" => {
                    let p = v.as_f64().ok_or_else(|| fmt_err(format!("{key} must be a number")))?;
                    flip_rate(p)?;
                    if key == "measure_flip" {
                        model.measure_flip = p;
                    } else {
                        model.prep_flip = p;
                    }
                }
                "unbound" => {
                    model.unbound = match v.as_str() {
                        Some("ideal") => UnboundPolicy::Ideal,
                        Some("error") => UnboundPolicy::Error,
                        _ => return Err(fmt_err("unbound must be `ideal` or `error`".into())),
                    }
                }
                label => {
                    let arity = OpKind::from_label(label)
                        .map(|k| k.arity())
                        .ok_or_else(|| fmt_err(format!("unknown instruction label {label}")))?;
                    let noise = match &v {
                        Value::Sequence(_) => GateNoise {
                            pre: SparseGenerator::new(arity),
                            post: parse_terms(&v, arity, label)?,
                        },
                        Value::Mapping(m) => {
                            for k in m.keys() {
                                if !matches!(k.as_str(), Some("pre") | Some("post")) {
                                    return Err(fmt_err(format!("{label}: only `pre` and `post` allowed")));
                                }
                            }
                            let get = |name: &str| -> Result<SparseGenerator, ModelError> {
                                match m.get(name) {
                                    Some(t) => parse_terms(t, arity, label),
                                    None => Ok(SparseGenerator::new(arity)),
                                }
                            };
                            GateNoise {
                                pre: get("pre")?,
                                post: get("post")?,
                            }
                        }
                        _ => return Err(fmt_err(format!("{label}: expected a list or a pre/post mapping"))),
                    };
                    model.bind(label, noise)?;
                }
            }
        }
        Ok(model)
    }

    /// Canonical YAML text; `from_yaml` of the output reproduces the model.
    pub fn to_yaml(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "unbound: {}",
            if self.unbound == UnboundPolicy::Ideal { "ideal" } else { "error" }
        )
        .unwrap();
        writeln!(s, "measure_flip: {:?}", self.measure_flip).unwrap();
        writeln!(s, "prep_flip: {:?}", self.prep_flip).unwrap();
        let terms = |g: &SparseGenerator| -> String {
            let items: Vec<String> = g
                .iter()
                .map(|(e, r)| {
                    let paulis: Vec<String> = e.indices().map(|p| p.label()).collect();
                    format!("{{sector: {:?}, paulis: [{}], rate: {:?}}}", e.sector(), paulis.join(", "), r)
                })
                .collect();
            format!("[{}]", items.join(", "))
        };
        for (label, b) in &self.bindings {
            writeln!(s, "{label}:").unwrap();
            writeln!(s, "  pre: {}", terms(&b.pre)).unwrap();
            writeln!(s, "  post: {}", terms(&b.post)).unwrap();
        }
        s
    }
}

fn parse_terms(v: &Value, arity: usize, label: &str) -> Result<SparseGenerator, ModelError> {
    let err = |m: String| ModelError::Format(format!("{label}: {m}"));
    let seq = v.as_sequence().ok_or_else(|| err("expected a list of terms".into()))?;
    let mut g = SparseGenerator::new(arity);
    for t in seq {
        let sector = t
            .get("sector")
            .and_then(Value::as_str)
            .and_then(Sector::parse)
            .ok_or_else(|| err("term needs sector H, S, C or A".into()))?;
        let rate = t
            .get("rate")
            .and_then(Value::as_f64)
            .ok_or_else(|| err("term needs a numeric rate".into()))?;
        let paulis: Vec<PauliString> = t
            .get("paulis")
            .and_then(Value::as_sequence)
            .ok_or_else(|| err("term needs a paulis list".into()))?
            .iter()
            .map(|p| {
                let s = p.as_str().ok_or_else(|| err("pauli labels must be strings".into()))?;
                let ps: PauliString = s.parse().map_err(|_| err(format!("bad pauli {s:?}")))?;
                if ps.num_qubits() != arity {
                    return Err(err(format!("pauli {s} has {} qubits, expected {arity}", ps.num_qubits())));
                }
                if (0..arity).all(|q| ps.get(q) == Pauli::I) {
                    return Err(err("identity index".into()));
                }
                Ok(ps)
            })
            .collect::<Result<_, _>>()?;
        if paulis.len() != sector.index_count() {
            return Err(err(format!("{sector:?} term needs {} paulis", sector.index_count())));
        }
        g.add_term(sector, &paulis[0], paulis.get(1), rate)?;
    }
    Ok(g)
}
