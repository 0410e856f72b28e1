use std::fmt;

use demforge_pauli::PauliString;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EegError {
    #[error("EEG index must not be the identity")]
    IdentityIndex,
    #[error("EEG index {0} is not Hermitian")]
    NonHermitian(PauliString),
    #[error("sector {0:?} takes {1} Pauli index(es)")]
    IndexCount(Sector, usize),
    #[error("index sizes differ: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
}

/// Hamiltonian, stochastic, correlation and active sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    H,
    S,
    C,
    A,
}

impl Sector {
    pub fn parse(s: &str) -> Option<Sector> {
        match s {
            "H" => Some(Sector::H),
            "S" => Some(Sector::S),
            "C" => Some(Sector::C),
            "A" => Some(Sector::A),
            _ => None,
        }
    }

    pub fn index_count(self) -> usize {
        match self {
            Sector::H | Sector::S => 1,
            Sector::C | Sector::A => 2,
        }
    }
}

/// One basis generator with unsigned indices:
///
/// * `H_P[ρ] = -i[P, ρ]`
/// * `S_P[ρ] = PρP - ρ`
/// * `C_{P,Q}[ρ] = PρQ + QρP - ½{{P,Q}, ρ}`
/// * `A_{P,Q}[ρ] = i(PρQ - QρP + ½{[P,Q], ρ})`
///
/// For C and A, `p < q` in `PauliString` order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Eeg {
    sector: Sector,
    p: PauliString,
    q: Option<PauliString>,
}

impl Eeg {
    /// Canonical form of `sector` on signed indices. Returns the basis element and
    /// the factor it carries (`X_{-P} = -X_P` for H, index swaps negate A,
    /// `C_{P,P} = 2 S_P`), or `None` when the generator vanishes (`A_{P,P}`).
    pub fn canonical(
        sector: Sector,
        p: &PauliString,
        q: Option<&PauliString>,
    ) -> Result<Option<(Eeg, f64)>, EegError> {
        let check = |x: &PauliString| -> Result<(PauliString, f64), EegError> {
            if !x.is_hermitian() {
                return Err(EegError::NonHermitian(x.clone()));
            }
            if x.is_identity() {
                return Err(EegError::IdentityIndex);
            }
            let (u, s) = x.unsigned();
            Ok((u, s as f64))
        };
        let given = 1 + q.is_some() as usize;
        if given != sector.index_count() {
            return Err(EegError::IndexCount(sector, sector.index_count()));
        }
        let (p, sp) = check(p)?;
        match sector {
            Sector::H => Ok(Some((Eeg { sector, p, q: None }, sp))),
            Sector::S => Ok(Some((Eeg { sector, p, q: None }, 1.0))),
            Sector::C | Sector::A => {
                let q = q.expect("checked above");
                if q.num_qubits() != p.num_qubits() {
                    return Err(EegError::SizeMismatch(p.num_qubits(), q.num_qubits()));
                }
                let (q, sq) = check(q)?;
                let sign = sp * sq;
                if p == q {
                    return Ok(match sector {
                        Sector::C => Some((Eeg { sector: Sector::S, p, q: None }, 2.0 * sign)),
                        _ => None,
                    });
                }
                let (a, b, swap) = if p < q { (p, q, 1.0) } else { (q, p, -1.0) };
                let factor = if sector == Sector::A { sign * swap } else { sign };
                Ok(Some((Eeg { sector, p: a, q: Some(b) }, factor)))
            }
        }
    }

    /// `H_P` for an unsigned non-identity `P` (panics otherwise).
    pub fn h(p: PauliString) -> Eeg {
        assert!(p.phase() == 0 && !p.is_identity());
        Eeg { sector: Sector::H, p, q: None }
    }

    /// `S_P` for an unsigned non-identity `P` (panics otherwise).
    pub fn s(p: PauliString) -> Eeg {
        assert!(p.phase() == 0 && !p.is_identity());
        Eeg { sector: Sector::S, p, q: None }
    }

    /// Builds from already canonical parts; used by decompositions that produce
    /// canonical indices by construction.
    pub(crate) fn from_canonical_parts(sector: Sector, p: PauliString, q: Option<PauliString>) -> Eeg {
        debug_assert!(p.phase() == 0 && !p.is_identity());
        debug_assert!(q.as_ref().map_or(true, |q| q.phase() == 0 && p < *q));
        Eeg { sector, p, q }
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn p(&self) -> &PauliString {
        &self.p
    }

    pub fn q(&self) -> Option<&PauliString> {
        self.q.as_ref()
    }

    pub fn indices(&self) -> impl Iterator<Item = &PauliString> {
        std::iter::once(&self.p).chain(self.q.as_ref())
    }

    pub fn num_qubits(&self) -> usize {
        self.p.num_qubits()
    }

    /// Union of the index supports, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.p.support();
        if let Some(q) = &self.q {
            s.extend(q.support());
            s.sort_unstable();
            s.dedup();
        }
        s
    }

    /// Sufficient condition for the two superoperators to commute: stochastic
    /// pairs always do, and so does any pair whose indices all commute.
    pub fn trivially_commutes_with(&self, other: &Eeg) -> bool {
        if self.sector == Sector::S && other.sector == Sector::S {
            return true;
        }
        self.indices()
            .all(|a| other.indices().all(|b| a.commutes_unchecked(b)))
    }
}

impl fmt::Display for Eeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.q {
            None => write!(f, "{:?}_{}", self.sector, self.p.label()),
            Some(q) => write!(f, "{:?}_{{{},{}}}", self.sector, self.p.label(), q.label()),
        }
    }
}

impl fmt::Debug for Eeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
