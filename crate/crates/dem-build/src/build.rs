use std::time::{Duration, Instant};

use demforge_circuit::{ideal_final_state, ExpandedCircuit};
use demforge_dem::{DemEventKey, DetectorErrorModel};
use demforge_errgen::{bch_combine_graded, propagate_model, ErrorModel, SparseGenerator};
use demforge_pauli::{PauliString, StabilizerTableau};
use rayon::prelude::*;

use crate::classify::{classify, eeg_class};
use crate::compose::composition_corrections;
use crate::rate::{estimate_rate, RateMode};
use crate::zassenhaus::zassenhaus_split_with;
use crate::BuildError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeRatePolicy {
    #[default]
    Keep,
    /// Drop events with negative rates.
    Clamp,
    Reject,
}

impl NegativeRatePolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "keep" => Some(Self::Keep),
            "clamp" => Some(Self::Clamp),
            "reject" => Some(Self::Reject),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    pub bch_order: usize,
    pub zassenhaus_order: usize,
    pub rate_mode: RateMode,
    pub negative_rate_policy: NegativeRatePolicy,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            bch_order: 1,
            zassenhaus_order: 1,
            rate_mode: RateMode::ExactSOnlyPlusTaylor2,
            negative_rate_policy: NegativeRatePolicy::Keep,
        }
    }
}

impl BuildConfig {
    /// Leading order everywhere.
    pub fn leading() -> Self {
        BuildConfig { rate_mode: RateMode::Leading, ..Default::default() }
    }

    /// Whether pairs of single-event channels are composed to recover the
    /// second-order correlations between events. On for second-order
    /// Zassenhaus splits with a second-order rate mode.
    pub fn composes_channels(&self) -> bool {
        self.zassenhaus_order == 2 && self.rate_mode != RateMode::Leading
    }

    /// Second-order BCH, Zassenhaus and Taylor expansion.
    pub fn second_order() -> Self {
        BuildConfig {
            bch_order: 2,
            zassenhaus_order: 2,
            rate_mode: RateMode::Taylor2,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BuildReport {
    pub stage_timings: Vec<(&'static str, Duration)>,
    pub circuit_terms: usize,
    pub discarded_terms: usize,
    pub num_events: usize,
    pub negative_events: usize,
    pub clamped_events: usize,
}

/// Lowest-index detector (or observable) of the event.
pub fn representative<'a>(key: &DemEventKey, events: &'a [PauliString]) -> &'a PauliString {
    let i = (0..key.num_bits()).find(|&i| key.bit(i)).expect("nonempty key");
    &events[i]
}

/// Rate of a single-class generator. Fails if any term belongs to another class.
pub fn estimate_event_rate(
    key: &DemEventKey,
    class_gen: &SparseGenerator,
    events: &[PauliString],
    state: &StabilizerTableau,
    mode: RateMode,
) -> Result<f64, BuildError> {
    for (e, _) in class_gen.iter() {
        if eeg_class(e, events, key.num_detectors()).as_ref() != Some(key) {
            return Err(BuildError::MixedClass { event: key.to_string(), term: e.to_string() });
        }
    }
    estimate_rate(class_gen, state, representative(key, events), mode)
}

pub fn build_dem(ec: &ExpandedCircuit, m: &ErrorModel, cfg: &BuildConfig) -> Result<DetectorErrorModel, BuildError> {
    build_dem_with_report(ec, m, cfg).map(|(d, _)| d)
}

pub fn build_dem_with_report(
    ec: &ExpandedCircuit,
    m: &ErrorModel,
    cfg: &BuildConfig,
) -> Result<(DetectorErrorModel, BuildReport), BuildError> {
    let mut report = BuildReport::default();
    let mut clock = Instant::now();
    let mut lap = |report: &mut BuildReport, name: &'static str| {
        report.stage_timings.push((name, clock.elapsed()));
        clock = Instant::now();
    };
    let n = ec.total_qubits;
    let nd = ec.num_detectors();
    let events = ec.event_paulis();

    let propagated = propagate_model(ec, m)?;
    lap(&mut report, "propagate");
    let graded = bch_combine_graded(&propagated, cfg.bch_order, n).map_err(|e| BuildError::Order(e.0))?;
    let total = graded.total();
    report.circuit_terms = total.len();
    lap(&mut report, "bch");

    let partition = classify(&total, &events, nd);
    report.discarded_terms = partition.discarded.len();
    let first = if graded.second.is_empty() { None } else { Some(classify(&graded.first, &events, nd)) };
    let first = first.as_ref().unwrap_or(&partition);
    let split = zassenhaus_split_with(&partition, first, cfg.zassenhaus_order, &events, nd)?;
    lap(&mut report, "classify+split");

    let state = ideal_final_state(ec);
    let mut rates: Vec<(DemEventKey, f64)> = split
        .par_iter()
        .map(|(k, g)| estimate_event_rate(k, g, &events, &state, cfg.rate_mode).map(|p| (k.clone(), p)))
        .collect::<Result<_, _>>()?;
    lap(&mut report, "rates");

    if cfg.composes_channels() {
        let corrections = composition_corrections(first, &events, nd, &state);
        let mut merged: std::collections::BTreeMap<DemEventKey, f64> = rates.into_iter().collect();
        for (k, q) in corrections {
            *merged.entry(k).or_insert(0.0) += q;
        }
        rates = merged.into_iter().collect();
        lap(&mut report, "compose");
    }

    let mut dem = DetectorErrorModel::new(nd, ec.num_observables());
    let mut negative = Vec::new();
    for (k, p) in rates {
        if p == 0.0 {
            continue;
        }
        if p < 0.0 {
            negative.push((k.to_string(), p));
            if cfg.negative_rate_policy == NegativeRatePolicy::Clamp {
                report.clamped_events += 1;
                continue;
            }
        }
        dem.insert(k, p)?;
    }
    report.negative_events = negative.len();
    if cfg.negative_rate_policy == NegativeRatePolicy::Reject && !negative.is_empty() {
        return Err(BuildError::NegativeRates(negative));
    }
    report.num_events = dem.len();
    Ok((dem, report))
}
