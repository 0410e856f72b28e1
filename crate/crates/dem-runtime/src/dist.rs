use crate::{DemError, DemEventKey, DetectorErrorModel};

/// Largest history width handled by dense distributions.
pub const MAX_DISTRIBUTION_BITS: usize = 24;

/// A dense probability vector over detection histories. Entry `h` is the
/// history whose bit `i` is detector `i`, with observables after the detectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    num_detectors: usize,
    num_observables: usize,
    probs: Vec<f64>,
}

fn check_bits(bits: usize) -> Result<(), DemError> {
    if bits > MAX_DISTRIBUTION_BITS {
        return Err(DemError::TooLarge { bits, cap: MAX_DISTRIBUTION_BITS });
    }
    Ok(())
}

impl Distribution {
    /// All probability on the all-zeros history.
    pub fn point_mass(num_detectors: usize, num_observables: usize) -> Result<Self, DemError> {
        check_bits(num_detectors + num_observables)?;
        let mut probs = vec![0.0; 1 << (num_detectors + num_observables)];
        probs[0] = 1.0;
        Ok(Distribution { num_detectors, num_observables, probs })
    }

    pub fn from_probs(num_detectors: usize, num_observables: usize, probs: Vec<f64>) -> Result<Self, DemError> {
        check_bits(num_detectors + num_observables)?;
        if probs.len() != 1 << (num_detectors + num_observables) {
            return Err(DemError::InvalidDistribution(format!(
                "{} entries for {} history bits",
                probs.len(),
                num_detectors + num_observables
            )));
        }
        Ok(Distribution { num_detectors, num_observables, probs })
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn num_bits(&self) -> usize {
        self.num_detectors + self.num_observables
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, mask: u64) -> f64 {
        self.probs[mask as usize]
    }

    pub fn probability(&self, h: &DemEventKey) -> f64 {
        self.get(h.to_mask().expect("distribution histories fit a mask"))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ_h (−1)^{|h ∧ subset|} P(h)`.
    pub fn polarization(&self, subset: u64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(h, &p)| if (h as u64 & subset).count_ones() % 2 == 0 { p } else { -p })
            .sum()
    }

    /// All `2^N` polarizations, indexed by subset mask (a Walsh–Hadamard transform).
    pub fn polarizations(&self) -> Vec<f64> {
        let mut v = self.probs.clone();
        let mut h = 1;
        while h < v.len() {
            for i in (0..v.len()).step_by(2 * h) {
                for j in i..i + h {
                    let (a, b) = (v[j], v[j + h]);
                    v[j] = a + b;
                    v[j + h] = a - b;
                }
            }
            h *= 2;
        }
        v
    }

    /// Marginal over detectors only.
    pub fn detector_marginal(&self) -> Distribution {
        let nd = self.num_detectors;
        let mut probs = vec![0.0; 1 << nd];
        let mask = (1usize << nd) - 1;
        for (h, &p) in self.probs.iter().enumerate() {
            probs[h & mask] += p;
        }
        Distribution { num_detectors: nd, num_observables: 0, probs }
    }

    pub fn tvd(&self, other: &Distribution) -> Result<f64, DemError> {
        tvd(self, other)
    }
}

/// `½ Σ |p − q|`.
pub fn tvd(p: &Distribution, q: &Distribution) -> Result<f64, DemError> {
    if p.num_detectors != q.num_detectors || p.num_observables != q.num_observables {
        return Err(DemError::ShapeMismatch {
            expected: (p.num_detectors, p.num_observables),
            got: (q.num_detectors, q.num_observables),
        });
    }
    Ok(0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Exact history distribution of a DEM by convolving its events. Negative
/// probabilities are convolved as signed weights.
pub fn exact_distribution(dem: &DetectorErrorModel) -> Result<Distribution, DemError> {
    let mut d = Distribution::point_mass(dem.num_detectors(), dem.num_observables())?;
    for (k, p) in dem.events() {
        let m = k.to_mask().expect("checked width") as usize;
        let old = d.probs.clone();
        for (h, slot) in d.probs.iter_mut().enumerate() {
            *slot = (1.0 - p) * old[h] + p * old[h ^ m];
        }
    }
    Ok(d)
}

/// Polarization of `subset` under a DEM, computed without the distribution.
pub fn polarization(dem: &DetectorErrorModel, subset: &DemEventKey) -> f64 {
    dem.polarization(subset)
}
