use demforge_circuit::OpKind;
use demforge_pauli::{Pauli, PauliString};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eeg::Sector;
use crate::generator::SparseGenerator;
use crate::model::{ErrorModel, GateNoise, ModelError, UnboundPolicy};

/// Sparsity and strength of the random channel bound to one instruction label.
#[derive(Debug, Clone, PartialEq)]
pub struct GateNoiseSpec {
    pub label: String,
    pub arity: usize,
    pub h_terms: usize,
    /// Target `Σ h²`.
    pub h_infidelity: f64,
    pub s_terms: usize,
    /// Target `Σ s`, the trace of the dissipative block.
    pub s_infidelity: f64,
    /// Fill the off-diagonal C/A entries of the dissipative block.
    pub correlated: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RandomModelSpec {
    pub gates: Vec<GateNoiseSpec>,
    pub measure_flip: f64,
    pub prep_flip: f64,
}

impl RandomModelSpec {
    /// Coherent-only model: two-qubit labels get 5 random H terms with `Σh² = p`,
    /// one-qubit labels get `H_X, H_Y, H_Z` with `Σh² = p/10`.
    pub fn h_only(labels: &[&str], p: f64) -> Self {
        let gates = labels
            .iter()
            .map(|&l| {
                let arity = OpKind::from_label(l).map_or(1, |k| k.arity());
                let (h_terms, h_infidelity) = if arity == 2 { (5, p) } else { (3, 0.1 * p) };
                GateNoiseSpec {
                    label: l.to_string(),
                    arity,
                    h_terms,
                    h_infidelity,
                    s_terms: 0,
                    s_infidelity: 0.0,
                    correlated: false,
                }
            })
            .collect();
        RandomModelSpec { gates, ..Default::default() }
    }

    /// Stochastic-only model with `Σs = p` per label, spread over a few random Paulis.
    pub fn s_only(labels: &[&str], p: f64) -> Self {
        let gates = labels
            .iter()
            .map(|&l| {
                let arity = OpKind::from_label(l).map_or(1, |k| k.arity());
                GateNoiseSpec {
                    label: l.to_string(),
                    arity,
                    h_terms: 0,
                    h_infidelity: 0.0,
                    s_terms: if arity == 2 { 5 } else { 3 },
                    s_infidelity: p,
                    correlated: false,
                }
            })
            .collect();
        RandomModelSpec { gates, ..Default::default() }
    }

    /// General CPTP model: H terms with `Σh² = p_h` and a correlated dissipative
    /// block of trace `p_s`.
    pub fn cptp(labels: &[&str], p_h: f64, p_s: f64) -> Self {
        let gates = labels
            .iter()
            .map(|&l| {
                let arity = OpKind::from_label(l).map_or(1, |k| k.arity());
                GateNoiseSpec {
                    label: l.to_string(),
                    arity,
                    h_terms: if arity == 2 { 5 } else { 3 },
                    h_infidelity: p_h,
                    s_terms: if arity == 2 { 4 } else { 3 },
                    s_infidelity: p_s,
                    correlated: true,
                }
            })
            .collect();
        RandomModelSpec { gates, ..Default::default() }
    }
}

fn pauli_from_code(arity: usize, mut code: usize) -> PauliString {
    let mut p = PauliString::identity(arity);
    for q in 0..arity {
        p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][code % 4]).expect("in range");
        code /= 4;
    }
    p
}

fn distinct_paulis(rng: &mut ChaCha8Rng, arity: usize, count: usize) -> Vec<PauliString> {
    let total = 4usize.pow(arity as u32) - 1;
    let mut v: Vec<PauliString> = sample(rng, total, count)
        .into_iter()
        .map(|i| pauli_from_code(arity, i + 1))
        .collect();
    v.sort();
    v
}

/// Samples a model whose every binding is completely positive and whose
/// per-label generator infidelity equals the requested `Σh² + Σs`.
pub fn sample_random_cptp_model(spec: &RandomModelSpec, seed: u64) -> Result<ErrorModel, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = ErrorModel {
        measure_flip: spec.measure_flip,
        prep_flip: spec.prep_flip,
        unbound: UnboundPolicy::Ideal,
        ..Default::default()
    };
    let bad = |m: String| ModelError::InfeasibleSpec(m);
    for g in &spec.gates {
        let max_terms = 4usize.pow(g.arity as u32) - 1;
        if let Some(kind) = OpKind::from_label(&g.label) {
            if kind.arity() != g.arity {
                return Err(bad(format!("{} has arity {}, spec says {}", g.label, kind.arity(), g.arity)));
            }
        }
        for (what, terms, target) in [("H", g.h_terms, g.h_infidelity), ("S", g.s_terms, g.s_infidelity)] {
            if !(target >= 0.0) || !target.is_finite() {
                return Err(bad(format!("{}: {what} infidelity {target} must be a nonnegative number", g.label)));
            }
            if terms > max_terms {
                return Err(bad(format!("{}: {terms} {what} terms but only {max_terms} Paulis", g.label)));
            }
            if terms == 0 && target > 0.0 {
                return Err(bad(format!("{}: positive {what} infidelity needs at least one term", g.label)));
            }
        }
        let mut gen = SparseGenerator::new(g.arity);
        if g.h_infidelity > 0.0 {
            let ps = distinct_paulis(&mut rng, g.arity, g.h_terms);
            let dirs: Vec<f64> = (0..ps.len()).map(|_| rng.sample(StandardNormal)).collect();
            let norm = dirs.iter().map(|x| x * x).sum::<f64>().sqrt();
            let scale = g.h_infidelity.sqrt() / norm;
            for (p, d) in ps.iter().zip(&dirs) {
                gen.add_term(Sector::H, p, None, d * scale)?;
            }
        }
        if g.s_infidelity > 0.0 {
            let ps = distinct_paulis(&mut rng, g.arity, g.s_terms);
            let m = ps.len();
            let b = DMatrix::<Complex64>::from_fn(m, m, |i, j| {
                if g.correlated || i == j {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = if g.correlated { rng.sample(StandardNormal) } else { 0.0 };
                    Complex64::new(re, im)
                } else {
                    Complex64::default()
                }
            });
            let block = &b * b.adjoint();
            let trace: f64 = (0..m).map(|i| block[(i, i)].re).sum();
            let block = block * Complex64::from(g.s_infidelity / trace);
            for i in 0..m {
                gen.add_term(Sector::S, &ps[i], None, block[(i, i)].re)?;
                for j in i + 1..m {
                    gen.add_term(Sector::C, &ps[i], Some(&ps[j]), block[(i, j)].re)?;
                    gen.add_term(Sector::A, &ps[i], Some(&ps[j]), block[(i, j)].im)?;
                }
            }
        }
        if !gen.is_empty() {
            model.bind(&g.label, GateNoise::post_only(gen))?;
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_only_rates_hit_the_target() {
        let m = sample_random_cptp_model(&RandomModelSpec::h_only(&["CX", "H"], 1e-3), 5).unwrap();
        let cx = &m.bindings["CX"].post;
        assert_eq!(cx.len(), 5);
        assert!(cx.has_only(Sector::H));
        assert!((cx.infidelity() - 1e-3).abs() < 1e-15);
        assert!((m.bindings["H"].post.infidelity() - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn zero_infidelity_gives_empty_model() {
        let m = sample_random_cptp_model(&RandomModelSpec::h_only(&["CX"], 0.0), 1).unwrap();
        assert!(m.bindings.is_empty());
    }

    #[test]
    fn dissipative_block_is_psd() {
        for seed in 0..20 {
            let m = sample_random_cptp_model(&RandomModelSpec::cptp(&["CX", "H"], 1e-3, 2e-3), seed).unwrap();
            for b in m.bindings.values() {
                assert!(b.post.dissipative_min_eigenvalue() >= -1e-12);
                let s: f64 = b.post.iter().filter(|(e, _)| e.sector() == Sector::S).map(|(_, r)| r).sum();
                assert!((s - 2e-3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn infeasible_specs() {
        let mut spec = RandomModelSpec::h_only(&["H"], 1e-3);
        spec.gates[0].h_terms = 4;
        assert!(sample_random_cptp_model(&spec, 0).is_err());
        let spec = RandomModelSpec::h_only(&["CX"], -1.0);
        assert!(sample_random_cptp_model(&spec, 0).is_err());
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let spec = RandomModelSpec::cptp(&["CX"], 1e-3, 1e-3);
        assert_eq!(sample_random_cptp_model(&spec, 9).unwrap(), sample_random_cptp_model(&spec, 9).unwrap());
    }
}
