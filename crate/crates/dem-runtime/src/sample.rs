use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{DemError, DetectionHistory, DetectorErrorModel};

fn checked_events(dem: &DetectorErrorModel) -> Result<Vec<(&crate::DemEventKey, f64)>, DemError> {
    let events: Vec<_> = dem.events().collect();
    for (k, p) in &events {
        if !(0.0..=1.0).contains(p) {
            return Err(DemError::NegativeProbability { event: k.to_string(), p: *p });
        }
    }
    Ok(events)
}

/// The generator for one shot: stream `shot` of the seed, so results do not
/// depend on how shots are spread over threads.
fn shot_rng(seed: u64, shot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot as u64);
    rng
}

fn one_shot(events: &[(&crate::DemEventKey, f64)], dem: &DetectorErrorModel, seed: u64, shot: usize) -> DetectionHistory {
    let mut rng = shot_rng(seed, shot);
    let mut h = dem.empty_key();
    for (k, p) in events {
        if rng.gen::<f64>() < *p {
            h.xor_assign(k);
        }
    }
    h
}

/// Draws `shots` histories. Each event fires independently with its probability.
pub fn sample(dem: &DetectorErrorModel, shots: usize, seed: u64) -> Result<Vec<DetectionHistory>, DemError> {
    let events = checked_events(dem)?;
    Ok((0..shots).into_par_iter().map(|s| one_shot(&events, dem, seed, s)).collect())
}

/// Same draws as [`sample`], packed one record per shot with bits in
/// little-endian order (detectors then observables).
pub fn sample_packed(dem: &DetectorErrorModel, shots: usize, seed: u64) -> Result<Vec<u8>, DemError> {
    let events = checked_events(dem)?;
    let record = (dem.num_detectors() + dem.num_observables()).div_ceil(8);
    let chunks: Vec<Vec<u8>> = (0..shots)
        .into_par_iter()
        .map(|s| {
            let mut out = Vec::with_capacity(record);
            one_shot(&events, dem, seed, s).write_packed(&mut out);
            out
        })
        .collect();
    Ok(chunks.concat())
}
