use std::collections::BTreeMap;

use demforge_dem::DemEventKey;
use demforge_errgen::{Chi, SparseGenerator, CANCELLATION_TOLERANCE};
use demforge_pauli::{PauliString, StabilizerTableau};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::classify::{delta, EventClassPartition};
use crate::rate::pauli_expectation;

type Spectrum = BTreeMap<DemEventKey, Complex64>;

fn interacts(a: &SparseGenerator, b: &SparseGenerator) -> bool {
    a.iter().any(|(x, _)| b.iter().any(|(y, _)| !x.trivially_commutes_with(y)))
}

/// `f(y) = Σ_{Δ(P_b) = y} χ_ab ⟨P_b P_a⟩`, so that for any detector product
/// `P_S` with ideal expectation +1, `Tr(P_S L[ψ]) = Σ_y (−1)^{|y∧S|} f(y)`.
fn spectrum(chi: &Chi, events: &[PauliString], nd: usize, state: &StabilizerTableau) -> Spectrum {
    let mut out = Spectrum::new();
    for (a, b, v) in chi.entries() {
        let e = pauli_expectation(state, &b.mul_unchecked(a));
        if e != Complex64::default() {
            *out.entry(delta(b, events, nd)).or_default() += v * e;
        }
    }
    out
}

/// Second-order events missed by treating single-event channels as
/// independent stochastic flips.
///
/// The channels are the classes of `partition` in key order followed by the
/// discarded group, the factor order of `e^{X_1} ⋯ e^{X_k}`. For each pair
/// `i < j` the polarization error
/// `δ_S = Tr(P_S X_i∘X_j[ψ]) − Tr(P_S X_i[ψ]) Tr(P_S X_j[ψ])` is matched by
/// events with rates `q_y = 2^{-n} Σ_S (−1)^{|y∧S|} δ_S`, which reduce to
/// `f_{X_i∘X_j}(y) − (f_{X_i} ⋆ f_{X_j})(y)` with `⋆` the XOR convolution.
pub fn composition_corrections(
    partition: &EventClassPartition,
    events: &[PauliString],
    num_detectors: usize,
    state: &StabilizerTableau,
) -> BTreeMap<DemEventKey, f64> {
    let channels: Vec<&SparseGenerator> = partition
        .classes
        .values()
        .chain(std::iter::once(&partition.discarded))
        .filter(|g| !g.is_empty())
        .collect();
    let chis: Vec<Chi> = channels.par_iter().map(|g| Chi::from_generator(g)).collect();
    let spectra: Vec<Spectrum> = chis
        .par_iter()
        .map(|c| spectrum(c, events, num_detectors, state))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..channels.len())
        .flat_map(|i| (i + 1..channels.len()).map(move |j| (i, j)))
        .collect();
    let parts: Vec<Spectrum> = pairs
        .par_iter()
        .filter(|&&(i, j)| interacts(channels[i], channels[j]))
        .map(|&(i, j)| {
            let mut k = Chi::new(chis[i].num_qubits());
            k.add_composition(&chis[i], &chis[j], 1.0.into());
            let mut q = spectrum(&k, events, num_detectors, state);
            for (yi, fi) in &spectra[i] {
                for (yj, fj) in &spectra[j] {
                    *q.entry(yi.xor(yj)).or_default() -= fi * fj;
                }
            }
            let norm = |f: &Spectrum| f.values().map(|v| v.norm()).sum::<f64>();
            let cut = CANCELLATION_TOLERANCE * norm(&spectra[i]) * norm(&spectra[j]);
            q.retain(|_, v| v.re.abs() > cut);
            q
        })
        .collect();
    let mut total: BTreeMap<DemEventKey, f64> = BTreeMap::new();
    for part in parts {
        for (k, q) in part {
            if !k.is_empty() {
                *total.entry(k).or_insert(0.0) += q.re;
            }
        }
    }
    total
}
