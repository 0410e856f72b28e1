use std::collections::BTreeSet;

use demforge_dem::{DemEventKey, DetectorErrorModel};
use demforge_errgen::PropagatedGenerator;
use demforge_pauli::PauliString;

use crate::classify::delta;

/// `E₁`: the events `Δ(P)` of every Pauli index of every propagated EEG.
pub fn first_order_event_set(
    propagated: &[PropagatedGenerator],
    events: &[PauliString],
    num_detectors: usize,
) -> BTreeSet<DemEventKey> {
    let mut out = BTreeSet::new();
    for g in propagated {
        for (e, _) in g.generator.iter() {
            for p in e.indices() {
                let k = delta(p, events, num_detectors);
                if !k.is_empty() {
                    out.insert(k);
                }
            }
        }
    }
    out
}

/// `E_k`: nonempty symmetric differences of up to `k` members of `first`.
pub fn higher_order_event_set(first: &BTreeSet<DemEventKey>, k: usize) -> BTreeSet<DemEventKey> {
    assert!(k >= 1, "order must be at least 1");
    let mut all = first.clone();
    let mut frontier = first.clone();
    for _ in 1..k {
        let mut next = BTreeSet::new();
        for a in &frontier {
            for b in first {
                let x = a.xor(b);
                if !x.is_empty() && !all.contains(&x) {
                    next.insert(x);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// Events whose rate is below `−tol`. A leading-order DEM built from a CPTP
/// model should return nothing.
pub fn cptp_nonnegativity_check(dem: &DetectorErrorModel, tol: f64) -> Vec<(DemEventKey, f64)> {
    dem.events().filter(|(_, p)| *p < -tol).map(|(k, p)| (k.clone(), p)).collect()
}
