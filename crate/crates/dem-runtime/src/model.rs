use std::collections::BTreeMap;

use crate::{DemError, DemEventKey};

/// Independent events, each flipping a fixed detector/observable set with a
/// fixed probability. Probabilities may be negative when a build keeps
/// quasi-probability events.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DetectorErrorModel {
    num_detectors: usize,
    num_observables: usize,
    events: BTreeMap<DemEventKey, f64>,
}

impl DetectorErrorModel {
    pub fn new(num_detectors: usize, num_observables: usize) -> Self {
        DetectorErrorModel {
            num_detectors,
            num_observables,
            events: BTreeMap::new(),
        }
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events in canonical key order.
    pub fn events(&self) -> impl Iterator<Item = (&DemEventKey, f64)> {
        self.events.iter().map(|(k, &p)| (k, p))
    }

    pub fn probability(&self, key: &DemEventKey) -> f64 {
        self.events.get(key).copied().unwrap_or(0.0)
    }

    pub fn empty_key(&self) -> DemEventKey {
        DemEventKey::new(self.num_detectors, self.num_observables)
    }

    pub fn key(&self, detectors: &[usize], observables: &[usize]) -> Result<DemEventKey, DemError> {
        DemEventKey::from_indices(self.num_detectors, self.num_observables, detectors, observables)
    }

    fn check(&self, key: &DemEventKey, p: f64) -> Result<(), DemError> {
        if key.num_detectors() != self.num_detectors || key.num_observables() != self.num_observables {
            return Err(DemError::ShapeMismatch {
                expected: (self.num_detectors, self.num_observables),
                got: (key.num_detectors(), key.num_observables()),
            });
        }
        if key.is_empty() {
            return Err(DemError::EmptyKey);
        }
        if !p.is_finite() || p > 1.0 {
            return Err(DemError::InvalidProbability(p));
        }
        Ok(())
    }

    /// Sets the probability of `key`, replacing any previous value.
    pub fn insert(&mut self, key: DemEventKey, p: f64) -> Result<(), DemError> {
        self.check(&key, p)?;
        self.events.insert(key, p);
        Ok(())
    }

    /// Adds an independent event: an existing probability `q` becomes
    /// `p + q − 2pq`.
    pub fn merge(&mut self, key: DemEventKey, p: f64) -> Result<(), DemError> {
        self.check(&key, p)?;
        let e = self.events.entry(key).or_insert(0.0);
        *e = *e + p - 2.0 * *e * p;
        Ok(())
    }

    pub fn remove(&mut self, key: &DemEventKey) -> Option<f64> {
        self.events.remove(key)
    }

    pub fn retain(&mut self, mut f: impl FnMut(&DemEventKey, f64) -> bool) {
        self.events.retain(|k, p| f(k, *p));
    }

    pub fn map_probabilities(&mut self, mut f: impl FnMut(&DemEventKey, f64) -> f64) {
        for (k, p) in self.events.iter_mut() {
            *p = f(k, *p);
        }
    }

    pub fn negative_events(&self) -> Vec<(DemEventKey, f64)> {
        self.events.iter().filter(|(_, &p)| p < 0.0).map(|(k, &p)| (k.clone(), p)).collect()
    }

    /// `⟨∏_{i∈subset} (−1)^{bit_i}⟩ = ∏ (1 − 2p)` over events with odd overlap.
    pub fn polarization(&self, subset: &DemEventKey) -> f64 {
        self.events
            .iter()
            .filter(|(k, _)| k.overlap_parity(subset))
            .map(|(_, &p)| 1.0 - 2.0 * p)
            .product()
    }

    /// Largest absolute probability difference over the union of event keys.
    pub fn max_rate_difference(&self, other: &Self) -> f64 {
        self.events
            .keys()
            .chain(other.events.keys())
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .fold(0.0, f64::max)
    }
}
