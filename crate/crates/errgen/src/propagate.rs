use demforge_circuit::{ExpandedCircuit, NoiseSite, SiteKind};
use demforge_pauli::{CliffordOp, Pauli, PauliString};
use rayon::prelude::*;

use crate::eeg::Eeg;
use crate::generator::SparseGenerator;
use crate::model::{flip_rate, ErrorModel, ModelError};

/// A site's channel moved to the end of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedGenerator {
    pub site: usize,
    pub generator: SparseGenerator,
}

/// Pushes `g` through `ops` (first op first). Returns the canonical EEG and the
/// sign picked up from the conjugated indices.
pub fn propagate_eeg(g: &Eeg, ops: &[CliffordOp]) -> (Eeg, f64) {
    let push = |p: &PauliString| {
        let mut out = p.clone();
        for op in ops {
            op.conjugate_in_place(&mut out).expect("ops fit the register");
        }
        out
    };
    let p = push(g.p());
    let q = g.q().map(push);
    let (e, f) = Eeg::canonical(g.sector(), &p, q.as_ref())
        .expect("conjugation keeps indices valid")
        .expect("conjugation keeps distinct indices distinct");
    (e, f)
}

/// The site's bound channel on the full expanded register, with terms that touch
/// inactive qubits removed.
pub fn site_generator(ec: &ExpandedCircuit, m: &ErrorModel, site: &NoiseSite) -> Result<SparseGenerator, ModelError> {
    let n = ec.total_qubits;
    let local = match site.kind {
        SiteKind::Pre | SiteKind::Post => match m.binding(site.label, site.qubits.len())? {
            None => return Ok(SparseGenerator::new(n)),
            Some(b) if site.kind == SiteKind::Pre => b.pre.clone(),
            Some(b) => b.post.clone(),
        },
        SiteKind::MeasureFlip | SiteKind::PrepFlip => {
            let p = if site.kind == SiteKind::MeasureFlip { m.measure_flip } else { m.prep_flip };
            let mut g = SparseGenerator::new(1);
            if p > 0.0 {
                g.add(Eeg::s(PauliString::single(1, 0, Pauli::X).expect("one qubit")), flip_rate(p)?);
            }
            g
        }
    };
    if local.is_empty() {
        return Ok(SparseGenerator::new(n));
    }
    let embedded = local.embed(n, &site.qubits);
    if site.active.iter().all(|&a| a) {
        return Ok(embedded);
    }
    let dead: Vec<usize> = site
        .qubits
        .iter()
        .zip(&site.active)
        .filter(|(_, &a)| !a)
        .map(|(&q, _)| q)
        .collect();
    Ok(embedded.filtered(|e, _| {
        e.indices().all(|p| dead.iter().all(|&q| p.get(q) == Pauli::I))
    }))
}

/// One propagated generator per noise site, in site order. Sites without noise
/// give empty generators.
pub fn propagate_model(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<Vec<PropagatedGenerator>, ModelError> {
    let locals: Vec<SparseGenerator> = ec
        .noise_sites
        .iter()
        .map(|s| site_generator(ec, m, s))
        .collect::<Result<_, _>>()?;
    Ok(locals
        .into_par_iter()
        .enumerate()
        .map(|(i, g)| {
            let ops = &ec.clifford_sequence[ec.noise_sites[i].position..];
            let mut out = SparseGenerator::new(ec.total_qubits);
            for (e, r) in g.iter() {
                let (pe, f) = propagate_eeg(e, ops);
                out.add(pe, f * r);
            }
            PropagatedGenerator { site: i, generator: out }
        })
        .collect())
}
