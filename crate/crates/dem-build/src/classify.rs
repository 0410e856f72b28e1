use std::collections::BTreeMap;

use demforge_dem::DemEventKey;
use demforge_errgen::{Eeg, Sector, SparseGenerator};
use demforge_pauli::PauliString;

/// The event a Pauli fault triggers: bit `i` is set iff `p` anticommutes with
/// `events[i]`. `events` lists detectors first, then observables.
pub fn delta(p: &PauliString, events: &[PauliString], num_detectors: usize) -> DemEventKey {
    let mut k = DemEventKey::new(num_detectors, events.len() - num_detectors);
    for (i, e) in events.iter().enumerate() {
        if !p.commutes_unchecked(e) {
            k.toggle_bit(i);
        }
    }
    k
}

/// Event class of one EEG, or `None` when it has no first-order effect.
pub fn eeg_class(e: &Eeg, events: &[PauliString], num_detectors: usize) -> Option<DemEventKey> {
    let dp = delta(e.p(), events, num_detectors);
    if dp.is_empty() {
        return None;
    }
    match e.sector() {
        Sector::H | Sector::S => Some(dp),
        Sector::C | Sector::A => {
            let dq = delta(e.q().expect("two indices"), events, num_detectors);
            (dp == dq).then_some(dp)
        }
    }
}

/// A generator sorted into event classes. `discarded` holds the terms that
/// flip nothing at first order.
#[derive(Debug, Clone, PartialEq)]
pub struct EventClassPartition {
    pub classes: BTreeMap<DemEventKey, SparseGenerator>,
    pub discarded: SparseGenerator,
}

impl EventClassPartition {
    pub fn num_terms(&self) -> usize {
        self.classes.values().map(|g| g.len()).sum::<usize>() + self.discarded.len()
    }
}

pub fn classify(g: &SparseGenerator, events: &[PauliString], num_detectors: usize) -> EventClassPartition {
    let n = g.num_qubits();
    let mut classes: BTreeMap<DemEventKey, SparseGenerator> = BTreeMap::new();
    let mut discarded = SparseGenerator::new(n);
    for (e, r) in g.iter() {
        match eeg_class(e, events, num_detectors) {
            Some(k) => classes.entry(k).or_insert_with(|| SparseGenerator::new(n)).add(e.clone(), r),
            None => discarded.add(e.clone(), r),
        }
    }
    EventClassPartition { classes, discarded }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn delta_marks_anticommuting_detectors() {
        let events = [p("ZZI"), p("IZZ"), p("ZII")];
        assert!(delta(&p("III"), &events, 2).is_empty());
        let k = delta(&p("IXI"), &events, 2);
        assert_eq!(k.detectors(), vec![0, 1]);
        assert!(k.observables().is_empty());
        assert_eq!(delta(&p("XII"), &events, 2).observables(), vec![0]);
    }

    #[test]
    fn mismatched_correlations_are_discarded() {
        let events = [p("ZI"), p("IZ")];
        let mut g = SparseGenerator::new(2);
        g.add_term(Sector::C, &p("XI"), Some(&p("IX")), 0.1).unwrap();
        g.add_term(Sector::A, &p("XI"), Some(&p("YI")), 0.2).unwrap();
        g.add_term(Sector::S, &p("XI"), None, 0.3).unwrap();
        g.add_term(Sector::H, &p("ZZ"), None, 0.4).unwrap();
        let part = classify(&g, &events, 2);
        assert_eq!(part.classes.len(), 1);
        assert_eq!(part.classes.values().next().unwrap().len(), 2);
        assert_eq!(part.discarded.len(), 2);
        assert_eq!(part.num_terms(), 4);
    }
}
