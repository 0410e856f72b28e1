use demforge_dem::{DemEventKey, DetectorErrorModel, Distribution};

use crate::OracleError;

/// Recovered rates with magnitude at or below this are treated as absent.
pub const EVENT_FLOOR: f64 = 1e-13;

fn walsh_hadamard(v: &mut [f64]) {
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
}

/// The unique DEM reproducing every polarization of `dist`.
///
/// With `ω_S = −ln λ_S`, each event's log-attenuation is
/// `a_y = (2/2^N) Σ_S (−1)^{|y∧S|} ω_S` and its rate `p_y = ½(1 − e^{a_y})`.
pub fn estimate_dem_from_distribution(dist: &Distribution) -> Result<DetectorErrorModel, OracleError> {
    let (nd, no) = (dist.num_detectors(), dist.num_observables());
    let lambda = dist.polarizations();
    let total = lambda[0];
    let mut omega = Vec::with_capacity(lambda.len());
    for (s, &l) in lambda.iter().enumerate() {
        let l = l / total;
        if l <= 0.0 {
            return Err(OracleError::NonPositivePolarization { subset: s as u64, value: l });
        }
        omega.push(-l.ln());
    }
    walsh_hadamard(&mut omega);
    let scale = 2.0 / lambda.len() as f64;
    let mut dem = DetectorErrorModel::new(nd, no);
    for (y, &w) in omega.iter().enumerate().skip(1) {
        let p = 0.5 * (1.0 - (scale * w).exp());
        if p.abs() > EVENT_FLOOR {
            dem.insert(DemEventKey::from_mask(nd, no, y as u64), p)?;
        }
    }
    Ok(dem)
}
