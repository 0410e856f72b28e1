use thiserror::Error;

use crate::chi::commutator_generators;
use crate::generator::SparseGenerator;
use crate::propagate::PropagatedGenerator;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("BCH order {0} is not supported (use 1 or 2)")]
pub struct UnsupportedOrder(pub usize);

/// Circuit error generator split by perturbative grade: `first` is the plain sum
/// of the propagated generators, `second` holds the commutator correction.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedGenerator {
    pub first: SparseGenerator,
    pub second: SparseGenerator,
}

impl GradedGenerator {
    pub fn total(&self) -> SparseGenerator {
        let mut out = self.first.clone();
        out.add_scaled(&self.second, 1.0);
        out
    }
}

/// `log(e^{G_k} ... e^{G_1})` for generators listed in circuit order.
///
/// Order 2 adds `½ Σ_{i>j} [G_i, G_j]` (later generators on the left), computed
/// against a running prefix sum.
pub fn bch_combine_graded(gs: &[PropagatedGenerator], order: usize, num_qubits: usize) -> Result<GradedGenerator, UnsupportedOrder> {
    if !(1..=2).contains(&order) {
        return Err(UnsupportedOrder(order));
    }
    let mut first = SparseGenerator::new(num_qubits);
    let mut second = SparseGenerator::new(num_qubits);
    for g in gs {
        if order == 2 && !g.generator.is_empty() && !first.is_empty() {
            second.add_scaled(&commutator_generators(&g.generator, &first), 0.5);
        }
        first.add_scaled(&g.generator, 1.0);
    }
    Ok(GradedGenerator { first, second })
}

pub fn bch_combine(gs: &[PropagatedGenerator], order: usize, num_qubits: usize) -> Result<SparseGenerator, UnsupportedOrder> {
    bch_combine_graded(gs, order, num_qubits).map(|g| g.total())
}
