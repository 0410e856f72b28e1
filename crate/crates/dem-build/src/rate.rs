use demforge_errgen::{Chi, Eeg, Sector, SparseGenerator};
use demforge_pauli::{PauliString, StabilizerTableau};
use num_complex::Complex64;

use crate::BuildError;

/// How single-event channel rates are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateMode {
    /// First order in S/C/A rates plus the O(h²) content of H pairs.
    Leading,
    /// `exp(G) ≈ 1 + G + G∘G/2`.
    Taylor2,
    /// Closed form for purely stochastic classes, `Taylor2` otherwise.
    #[default]
    ExactSOnlyPlusTaylor2,
}

impl RateMode {
    pub fn parse(s: &str) -> Option<RateMode> {
        match s {
            "leading" => Some(RateMode::Leading),
            "taylor2" => Some(RateMode::Taylor2),
            "exact_s_only_plus_taylor2" | "exact" => Some(RateMode::ExactSOnlyPlusTaylor2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RateMode::Leading => "leading",
            RateMode::Taylor2 => "taylor2",
            RateMode::ExactSOnlyPlusTaylor2 => "exact_s_only_plus_taylor2",
        }
    }
}

fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `⟨ψ|R|ψ⟩` for a possibly non-Hermitian Pauli `R`.
pub(crate) fn pauli_expectation(state: &StabilizerTableau, r: &PauliString) -> Complex64 {
    let k = r.phase();
    let e = state.expectation(&r.clone().with_phase(0));
    i_pow(k) * f64::from(e)
}

/// `Tr(P L[|ψ⟩⟨ψ|]) = Σ χ_ab ⟨ψ| P_b P P_a |ψ⟩`.
pub fn chi_expectation(state: &StabilizerTableau, chi: &Chi, rep: &PauliString) -> f64 {
    let mut total = Complex64::default();
    for (a, b, v) in chi.entries() {
        let r = b.mul_unchecked(rep).mul_unchecked(a);
        total += v * pauli_expectation(state, &r);
    }
    total.re
}

fn check_representative(state: &StabilizerTableau, rep: &PauliString) -> Result<(), BuildError> {
    if !rep.is_hermitian() || state.expectation(rep) != 1 {
        return Err(BuildError::Representative(rep.to_string()));
    }
    Ok(())
}

/// First-order coefficient `Tr(P g[|ψ⟩⟨ψ|])` of an EEG against a detector
/// product `rep` whose ideal expectation is +1.
pub fn beta(state: &StabilizerTableau, g: &Eeg, rep: &PauliString) -> Result<f64, BuildError> {
    check_representative(state, rep)?;
    Ok(chi_expectation(state, &Chi::from_eeg(g, 1.0), rep))
}

/// `Tr(P G[ψ])` for a whole generator.
pub fn generator_beta(state: &StabilizerTableau, g: &SparseGenerator, rep: &PauliString) -> f64 {
    chi_expectation(state, &Chi::from_generator(g), rep)
}

/// `Tr(P (a∘b)[ψ])`.
pub fn composed_beta(state: &StabilizerTableau, a: &SparseGenerator, b: &SparseGenerator, rep: &PauliString) -> f64 {
    let mut c = Chi::new(a.num_qubits());
    c.add_composition(&Chi::from_generator(a), &Chi::from_generator(b), 1.0.into());
    chi_expectation(state, &c, rep)
}

/// Rate of the single event produced by `exp(class_gen)`, read off the
/// representative: `p = ½(1 − ⟨P⟩)`.
pub fn estimate_rate(
    class_gen: &SparseGenerator,
    state: &StabilizerTableau,
    rep: &PauliString,
    mode: RateMode,
) -> Result<f64, BuildError> {
    check_representative(state, rep)?;
    if class_gen.is_empty() {
        return Ok(0.0);
    }
    if mode == RateMode::ExactSOnlyPlusTaylor2 && class_gen.has_only(Sector::S) {
        let mut total = 0.0;
        for (e, s) in class_gen.iter() {
            if !e.p().commutes_unchecked(rep) {
                total += s;
            }
        }
        return Ok(0.5 * (1.0 - (-2.0 * total).exp()));
    }
    let first = generator_beta(state, class_gen, rep);
    let second = match mode {
        RateMode::Leading => {
            let h = class_gen.filtered(|e, _| e.sector() == Sector::H);
            if h.is_empty() {
                0.0
            } else {
                composed_beta(state, &h, &h, rep)
            }
        }
        _ => composed_beta(state, class_gen, class_gen, rep),
    };
    Ok(-0.5 * (first + 0.5 * second))
}
