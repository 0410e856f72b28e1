use demforge_dem::DemEventKey;
use demforge_errgen::{commutator_generators, SparseGenerator};
use demforge_pauli::PauliString;

use crate::classify::{classify, EventClassPartition};
use crate::BuildError;

/// Second Zassenhaus factor for the product `e^{X_1} ⋯ e^{X_k}` over the given
/// groups: `e^{X_1+…+X_k} = e^{X_1} ⋯ e^{X_k} e^{W}` with
/// `W = −½ Σ_{i<j} [X_i, X_j]` up to third order.
pub fn zassenhaus_second(groups: &[&SparseGenerator], num_qubits: usize) -> SparseGenerator {
    let mut w = SparseGenerator::new(num_qubits);
    let mut suffix = SparseGenerator::new(num_qubits);
    for g in groups.iter().rev() {
        if !suffix.is_empty() && !g.is_empty() {
            w.add_scaled(&commutator_generators(g, &suffix), -0.5);
        }
        suffix.add_scaled(g, 1.0);
    }
    w
}

/// Splits a generator into single-event channels.
///
/// The product runs over the classes in key order followed by the discarded
/// group. At order 2 the correction `W` is classified again and each piece is
/// merged into its class; pieces of new classes become new channels.
pub fn zassenhaus_split(
    partition: &EventClassPartition,
    order: usize,
    events: &[PauliString],
    num_detectors: usize,
) -> Result<Vec<(DemEventKey, SparseGenerator)>, BuildError> {
    zassenhaus_split_with(partition, partition, order, events, num_detectors)
}

/// As [`zassenhaus_split`], with the commutator correction computed from a
/// separate (typically first-order) partition.
pub fn zassenhaus_split_with(
    partition: &EventClassPartition,
    correction_source: &EventClassPartition,
    order: usize,
    events: &[PauliString],
    num_detectors: usize,
) -> Result<Vec<(DemEventKey, SparseGenerator)>, BuildError> {
    if !(1..=2).contains(&order) {
        return Err(BuildError::Order(order));
    }
    let mut classes = partition.classes.clone();
    if order == 2 {
        let n = partition.discarded.num_qubits();
        let mut groups: Vec<&SparseGenerator> = correction_source.classes.values().collect();
        groups.push(&correction_source.discarded);
        let w = zassenhaus_second(&groups, n);
        for (k, g) in classify(&w, events, num_detectors).classes {
            classes
                .entry(k)
                .or_insert_with(|| SparseGenerator::new(n))
                .add_scaled(&g, 1.0);
        }
    }
    Ok(classes.into_iter().filter(|(_, g)| !g.is_empty()).collect())
}
