use std::cmp::Ordering;
use std::fmt;

use crate::DemError;

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn ones(w: &[u64]) -> impl Iterator<Item = usize> + '_ {
    w.iter().enumerate().flat_map(|(k, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(64 * k + b)
        })
    })
}

/// A set of detectors and logical observables that flip together.
///
/// Also used for whole detection histories, which are XORs of event keys.
/// Keys order by their sorted detector list, then by their observable list.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DemEventKey {
    num_detectors: usize,
    num_observables: usize,
    det: Vec<u64>,
    obs: Vec<u64>,
}

/// One shot's detector outcomes followed by its observable outcomes.
pub type DetectionHistory = DemEventKey;

impl DemEventKey {
    pub fn new(num_detectors: usize, num_observables: usize) -> Self {
        DemEventKey {
            num_detectors,
            num_observables,
            det: vec![0; words(num_detectors)],
            obs: vec![0; words(num_observables)],
        }
    }

    pub fn from_indices(
        num_detectors: usize,
        num_observables: usize,
        detectors: &[usize],
        observables: &[usize],
    ) -> Result<Self, DemError> {
        let mut k = Self::new(num_detectors, num_observables);
        for &d in detectors {
            if d >= num_detectors {
                return Err(DemError::OutOfRange { kind: "detector", index: d, count: num_detectors });
            }
            k.toggle_detector(d);
        }
        for &o in observables {
            if o >= num_observables {
                return Err(DemError::OutOfRange { kind: "observable", index: o, count: num_observables });
            }
            k.toggle_observable(o);
        }
        Ok(k)
    }

    /// Bit `i < num_detectors` is detector `i`; the observables follow.
    pub fn from_mask(num_detectors: usize, num_observables: usize, mask: u64) -> Self {
        let mut k = Self::new(num_detectors, num_observables);
        for i in 0..num_detectors + num_observables {
            if (mask >> i) & 1 == 1 {
                k.toggle_bit(i);
            }
        }
        k
    }

    /// Inverse of [`from_mask`](Self::from_mask); `None` past 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        if self.num_bits() > 64 {
            return None;
        }
        let mut m = 0u64;
        for d in self.detectors() {
            m |= 1 << d;
        }
        for o in self.observables() {
            m |= 1 << (self.num_detectors + o);
        }
        Some(m)
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

    pub fn same_shape(&self, other: &Self) -> bool {
        self.num_detectors == other.num_detectors && self.num_observables == other.num_observables
    }

    pub fn detector(&self, i: usize) -> bool {
        (self.det[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn observable(&self, i: usize) -> bool {
        (self.obs[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Bit `i` in detectors-then-observables order.
    pub fn bit(&self, i: usize) -> bool {
        if i < self.num_detectors {
            self.detector(i)
        } else {
            self.observable(i - self.num_detectors)
        }
    }

    pub fn toggle_detector(&mut self, i: usize) {
        assert!(i < self.num_detectors, "detector {i} out of range");
        self.det[i / 64] ^= 1 << (i % 64);
    }

    pub fn toggle_observable(&mut self, i: usize) {
        assert!(i < self.num_observables, "observable {i} out of range");
        self.obs[i / 64] ^= 1 << (i % 64);
    }

    pub fn toggle_bit(&mut self, i: usize) {
        if i < self.num_detectors {
            self.toggle_detector(i)
        } else {
            self.toggle_observable(i - self.num_detectors)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.det.iter().chain(&self.obs).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.det.iter().chain(&self.obs).map(|w| w.count_ones() as usize).sum()
    }

    pub fn detectors(&self) -> Vec<usize> {
        ones(&self.det).collect()
    }

    pub fn observables(&self) -> Vec<usize> {
        ones(&self.obs).collect()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert!(self.same_shape(other), "key shapes differ");
        for (a, b) in self.det.iter_mut().zip(&other.det) {
            *a ^= b;
        }
        for (a, b) in self.obs.iter_mut().zip(&other.obs) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the overlap with `other`.
    pub fn overlap_parity(&self, other: &Self) -> bool {
        let c: u32 = self
            .det
            .iter()
            .zip(&other.det)
            .chain(self.obs.iter().zip(&other.obs))
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        c % 2 == 1
    }

    /// Little-endian packed bits, detectors then observables.
    pub fn write_packed(&self, out: &mut Vec<u8>) {
        let start = out.len();
        out.resize(start + self.num_bits().div_ceil(8), 0);
        for d in self.detectors() {
            out[start + d / 8] |= 1 << (d % 8);
        }
        for o in self.observables() {
            let i = self.num_detectors + o;
            out[start + i / 8] |= 1 << (i % 8);
        }
    }
}

impl Ord for DemEventKey {
    fn cmp(&self, other: &Self) -> Ordering {
        ones(&self.det)
            .cmp(ones(&other.det))
            .then_with(|| ones(&self.obs).cmp(ones(&other.obs)))
            .then_with(|| self.num_detectors.cmp(&other.num_detectors))
            .then_with(|| self.num_observables.cmp(&other.num_observables))
    }
}

impl PartialOrd for DemEventKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DemEventKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in self.detectors() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "D{d}")?;
            first = false;
        }
        for o in self.observables() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "L{o}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip() {
        let k = DemEventKey::from_indices(3, 2, &[0, 2], &[1]).unwrap();
        assert_eq!(k.to_mask(), Some(0b10101));
        assert_eq!(DemEventKey::from_mask(3, 2, 0b10101), k);
        assert_eq!(k.to_string(), "D0 D2 L1");
    }

    #[test]
    fn ordering_is_lexicographic_on_indices() {
        let k = |d: &[usize]| DemEventKey::from_indices(3, 0, d, &[]).unwrap();
        let mut v = vec![k(&[1]), k(&[0, 1]), k(&[0]), k(&[2]), k(&[0, 2])];
        v.sort();
        assert_eq!(v, vec![k(&[0]), k(&[0, 1]), k(&[0, 2]), k(&[1]), k(&[2])]);
    }

    #[test]
    fn xor_and_parity() {
        let a = DemEventKey::from_indices(70, 1, &[1, 65], &[0]).unwrap();
        let b = DemEventKey::from_indices(70, 1, &[65, 3], &[]).unwrap();
        assert_eq!(a.xor(&b).detectors(), vec![1, 3]);
        assert!(a.overlap_parity(&b));
        assert!(!a.overlap_parity(&a.xor(&b)));
        assert!(a.xor(&a).is_empty());
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(DemEventKey::from_indices(2, 0, &[2], &[]).is_err());
    }

    #[test]
    fn packing_is_lsb_first() {
        let k = DemEventKey::from_indices(9, 1, &[0, 8], &[0]).unwrap();
        let mut out = Vec::new();
        k.write_packed(&mut out);
        assert_eq!(out, vec![0b0000_0001, 0b0000_0011]);
    }
}
