use thiserror::Error;

use crate::ir::{Circuit, Layer, OpKind, Operation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: rec[-{back}] refers before the first of {available} measurements")]
    DanglingRecord {
        line: usize,
        back: usize,
        available: usize,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses the line-oriented circuit format. Instructions between `TICK`s form a
/// layer; an instruction that reuses a qubit already busy in the current layer
/// opens a new layer.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut c = Circuit::default();
    let mut current = Layer::default();
    let mut measurements = 0usize;
    let mut max_qubit: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) = match body.find(char::is_whitespace) {
            Some(i) => (&body[..i], body[i..].trim()),
            None => (body, ""),
        };
        let (name, arg) = split_args(head, line)?;

        match name {
            "TICK" => {
                if !current.ops.is_empty() {
                    c.layers.push(std::mem::take(&mut current));
                }
            }
            "DETECTOR" | "OBSERVABLE_INCLUDE" => {
                let recs = parse_records(rest, measurements, line)?;
                if name == "DETECTOR" {
                    c.detectors.push(recs);
                } else {
                    let i: usize = arg
                        .ok_or_else(|| syntax(line, "OBSERVABLE_INCLUDE needs an index"))?
                        .trim()
                        .parse()
                        .map_err(|_| syntax(line, "bad observable index"))?;
                    if c.observables.len() <= i {
                        c.observables.resize(i + 1, Vec::new());
                    }
                    for r in recs {
                        toggle(&mut c.observables[i], r);
                    }
                }
            }
            _ => {
                let kind = OpKind::from_label(name)
                    .ok_or_else(|| syntax(line, format!("unknown instruction {name}")))?;
                if arg.is_some() {
                    return Err(syntax(line, format!("{name} takes no arguments")));
                }
                let qubits: Vec<usize> = rest
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| syntax(line, format!("bad qubit {t:?}"))))
                    .collect::<Result<_, _>>()?;
                if qubits.is_empty() || qubits.len() % kind.arity() != 0 {
                    return Err(syntax(line, format!("{name} needs targets in groups of {}", kind.arity())));
                }
                for group in qubits.chunks(kind.arity()) {
                    if group.len() == 2 && group[0] == group[1] {
                        return Err(syntax(line, format!("{name} with repeated target {}", group[0])));
                    }
                    if group.iter().any(|&q| current.touches(q)) {
                        c.layers.push(std::mem::take(&mut current));
                    }
                    for &q in group {
                        max_qubit = Some(max_qubit.map_or(q, |m| m.max(q)));
                    }
                    if kind.is_measurement() {
                        measurements += 1;
                    }
                    current.ops.push(Operation {
                        kind,
                        targets: group.to_vec(),
                    });
                }
            }
        }
    }
    if !current.ops.is_empty() {
        c.layers.push(current);
    }
    c.num_qubits = max_qubit.map_or(0, |m| m + 1);
    Ok(c)
}

fn split_args(head: &str, line: usize) -> Result<(&str, Option<&str>), ParseError> {
    match head.find('(') {
        None => Ok((head, None)),
        Some(i) => {
            let inner = head[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| syntax(line, "unclosed parenthesis"))?;
            Ok((&head[..i], Some(inner)))
        }
    }
}

fn parse_records(rest: &str, available: usize, line: usize) -> Result<Vec<usize>, ParseError> {
    let mut out = Vec::new();
    for tok in rest.split_whitespace() {
        let back: usize = tok
            .strip_prefix("rec[-")
            .and_then(|t| t.strip_suffix(']'))
            .and_then(|t| t.parse().ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| syntax(line, format!("bad record reference {tok:?}")))?;
        if back > available {
            return Err(ParseError::DanglingRecord {
                line,
                back,
                available,
            });
        }
        toggle(&mut out, available - back);
    }
    out.sort_unstable();
    Ok(out)
}

fn toggle(v: &mut Vec<usize>, r: usize) {
    if let Some(i) = v.iter().position(|&x| x == r) {
        v.remove(i);
    } else {
        v.push(r);
        v.sort_unstable();
    }
}
