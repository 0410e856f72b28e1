//! Line-oriented DEM text format:
//!
//! ```text
//! dem version 1
//! detector D0
//! logical_observable L0
//! error(0.04) D0 L0
//! ```
//!
//! Probabilities are written in shortest round-trip decimal form, so parsing
//! a serialized model gives back identical `f64`s.

use std::fmt::Write;

use crate::{DemError, DemEventKey, DetectorErrorModel};

pub const HEADER: &str = "dem version 1";

pub fn serialize(dem: &DetectorErrorModel) -> String {
    let mut s = String::new();
    writeln!(s, "{HEADER}").unwrap();
    for d in 0..dem.num_detectors() {
        writeln!(s, "detector D{d}").unwrap();
    }
    for o in 0..dem.num_observables() {
        writeln!(s, "logical_observable L{o}").unwrap();
    }
    for (k, p) in dem.events() {
        writeln!(s, "error({p}) {k}").unwrap();
    }
    s
}

fn syntax(line: usize, msg: impl Into<String>) -> DemError {
    DemError::Syntax { line, msg: msg.into() }
}

fn index(tok: &str, prefix: char, line: usize) -> Result<usize, DemError> {
    tok.strip_prefix(prefix)
        .and_then(|r| r.parse().ok())
        .ok_or_else(|| syntax(line, format!("bad target {tok:?}")))
}

/// Parses the text format. Repeated events are combined as independent events.
pub fn parse_dem(text: &str) -> Result<DetectorErrorModel, DemError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    match lines.first() {
        Some((_, l)) if *l == HEADER => {}
        Some((n, l)) => return Err(syntax(*n, format!("expected {HEADER:?}, found {l:?}"))),
        None => return Err(syntax(0, "empty input")),
    }
    let (mut nd, mut no) = (0, 0);
    for &(n, l) in &lines[1..] {
        if let Some(rest) = l.strip_prefix("detector ") {
            nd = nd.max(index(rest.trim(), 'D', n)? + 1);
        } else if let Some(rest) = l.strip_prefix("logical_observable ") {
            no = no.max(index(rest.trim(), 'L', n)? + 1);
        } else if !l.starts_with("error(") {
            return Err(syntax(n, format!("unknown instruction {l:?}")));
        }
    }
    let mut dem = DetectorErrorModel::new(nd, no);
    for &(n, l) in &lines[1..] {
        let Some(rest) = l.strip_prefix("error(") else { continue };
        let close = rest.find(')').ok_or_else(|| syntax(n, "missing ')'"))?;
        let p: f64 = rest[..close]
            .trim()
            .parse()
            .map_err(|_| syntax(n, format!("bad probability {:?}", &rest[..close])))?;
        let mut key = DemEventKey::new(nd, no);
        for tok in rest[close + 1..].split_whitespace() {
            if tok.starts_with('D') {
                let i = index(tok, 'D', n)?;
                if i >= nd {
                    return Err(syntax(n, format!("undeclared detector {tok}")));
                }
                key.toggle_detector(i);
            } else {
                let i = index(tok, 'L', n)?;
                if i >= no {
                    return Err(syntax(n, format!("undeclared observable {tok}")));
                }
                key.toggle_observable(i);
            }
        }
        if key.is_empty() {
            return Err(syntax(n, "error with no targets"));
        }
        dem.merge(key, p).map_err(|e| syntax(n, e.to_string()))?;
    }
    Ok(dem)
}
