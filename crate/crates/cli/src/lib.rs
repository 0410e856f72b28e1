//! Subcommands of the `demforge` binary as plain functions returning text.

use std::fmt::Write;
use std::path::Path;

use demforge_build::{build_dem_with_report, BuildConfig, BuildError, NegativeRatePolicy, RateMode};
use demforge_circuit::{expand, fixtures, parse_circuit, Circuit, ExpandedCircuit};
use demforge_dem::{exact_distribution, parse_dem, sample, serialize, DemError, DemEventKey, DetectorErrorModel};
use demforge_errgen::{ErrorModel, ModelError};
use demforge_oracle::{exact_history_distribution, twirled_dem, OracleError};
use demforge_sensitivity::{
    detector_sensitivity, discard_sensitivity, event_sensitivity, Granularity, ParameterVector, SensitivityError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("circuit: {0}")]
    Circuit(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Dem(#[from] DemError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// A circuit file, or a fixture name when no such file exists.
pub fn load_circuit(spec: &str) -> Result<Circuit, CliError> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(c) = fixtures::fixture(spec) {
            return Ok(c);
        }
    }
    parse_circuit(&read(path)?).map_err(|e| CliError::Circuit(e.to_string()))
}

pub fn load_expanded(spec: &str) -> Result<ExpandedCircuit, CliError> {
    expand(&load_circuit(spec)?).map_err(|e| CliError::Circuit(e.to_string()))
}

/// The YAML model at `path`; no path means a noiseless model.
pub fn load_model(path: Option<&Path>) -> Result<ErrorModel, CliError> {
    match path {
        Some(p) => Ok(ErrorModel::from_yaml(&read(p)?)?),
        None => Ok(ErrorModel::noiseless()),
    }
}

pub fn load_dem(path: &Path) -> Result<DetectorErrorModel, CliError> {
    Ok(parse_dem(&read(path)?)?)
}

pub fn parse_rate_mode(s: &str) -> Result<RateMode, CliError> {
    RateMode::parse(s).ok_or_else(|| CliError::Usage(format!("unknown rate mode {s:?}")))
}

pub fn parse_negative_policy(s: &str) -> Result<NegativeRatePolicy, CliError> {
    NegativeRatePolicy::parse(s).ok_or_else(|| CliError::Usage(format!("unknown negative-rate policy {s:?}")))
}

/// Parses `D0 D3 L0` (space or comma separated) into a key.
pub fn parse_key(s: &str, num_detectors: usize, num_observables: usize) -> Result<DemEventKey, CliError> {
    let mut k = DemEventKey::new(num_detectors, num_observables);
    for tok in s.split([' ', ',']).filter(|t| !t.is_empty()) {
        let bad = || CliError::Usage(format!("bad target {tok:?}"));
        let (kind, idx) = tok.split_at(1);
        let i: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "D" if i < num_detectors => k.toggle_detector(i),
            "L" if i < num_observables => k.toggle_observable(i),
            _ => return Err(bad()),
        }
    }
    Ok(k)
}

pub fn cmd_fixture(name: &str) -> Result<String, CliError> {
    fixtures::fixture_text(name).ok_or_else(|| {
        CliError::Usage(format!("unknown fixture {name:?} (have {})", fixtures::NAMES.join(", ")))
    })
}

/// DEM text and a build report.
pub fn cmd_build(ec: &ExpandedCircuit, m: &ErrorModel, cfg: &BuildConfig) -> Result<(String, String), CliError> {
    let (dem, report) = build_dem_with_report(ec, m, cfg)?;
    let mut r = String::new();
    writeln!(r, "events\t{}", report.num_events).unwrap();
    writeln!(r, "negative_events\t{}", report.negative_events).unwrap();
    writeln!(r, "clamped_events\t{}", report.clamped_events).unwrap();
    writeln!(r, "circuit_terms\t{}", report.circuit_terms).unwrap();
    writeln!(r, "discarded_terms\t{}", report.discarded_terms).unwrap();
    for (stage, t) in &report.stage_timings {
        writeln!(r, "time_{stage}_ms\t{:.3}", t.as_secs_f64() * 1e3).unwrap();
    }
    Ok((serialize(&dem), r))
}

pub fn cmd_twirl(ec: &ExpandedCircuit, m: &ErrorModel) -> Result<String, CliError> {
    Ok(serialize(&twirled_dem(ec, m)?))
}

/// Largest per-instruction generator infidelity `Σh² + Σs` in the model.
pub fn model_infidelity(m: &ErrorModel) -> f64 {
    m.bindings.values().map(|b| b.pre.infidelity() + b.post.infidelity()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub history: u64,
    pub oracle: f64,
    pub ours: f64,
    pub twirl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub num_bits: usize,
    pub eps_gen: f64,
    pub tvd_ours: f64,
    pub tvd_twirl: f64,
    pub rows: Vec<HistoryRow>,
}

impl ValidationReport {
    /// `tvd_twirl / tvd_ours`.
    pub fn ratio(&self) -> f64 {
        self.tvd_twirl / self.tvd_ours
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "eps_gen\t{:e}", self.eps_gen).unwrap();
        writeln!(s, "tvd_ours\t{:e}", self.tvd_ours).unwrap();
        writeln!(s, "tvd_twirl\t{:e}", self.tvd_twirl).unwrap();
        writeln!(s, "ratio\t{:e}", self.ratio()).unwrap();
        writeln!(s, "history,oracle,ours,twirl,rel_err_ours,rel_err_twirl").unwrap();
        for r in &self.rows {
            let bits: String = (0..self.num_bits).map(|i| if r.history >> i & 1 == 1 { '1' } else { '0' }).collect();
            let rel = |x: f64| if r.oracle == 0.0 { 0.0 } else { (x - r.oracle) / r.oracle };
            writeln!(s, "{bits},{:e},{:e},{:e},{:e},{:e}", r.oracle, r.ours, r.twirl, rel(r.ours), rel(r.twirl)).unwrap();
        }
        s
    }
}

pub fn cmd_validate(ec: &ExpandedCircuit, m: &ErrorModel, cfg: &BuildConfig) -> Result<ValidationReport, CliError> {
    let oracle = exact_history_distribution(ec, m)?;
    let (ours, _) = build_dem_with_report(ec, m, cfg)?;
    let ours = exact_distribution(&ours)?;
    let twirl = exact_distribution(&twirled_dem(ec, m)?)?;
    let rows = (0..oracle.probs().len() as u64)
        .map(|h| HistoryRow { history: h, oracle: oracle.get(h), ours: ours.get(h), twirl: twirl.get(h) })
        .collect();
    Ok(ValidationReport {
        num_bits: oracle.num_bits(),
        eps_gen: model_infidelity(m),
        tvd_ours: ours.tvd(&oracle)?,
        tvd_twirl: twirl.tvd(&oracle)?,
        rows,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// `(eps_gen, tvd_ours, tvd_twirl)` per point.
    pub points: Vec<(f64, f64, f64)>,
}

impl SweepReport {
    pub fn slope_ours(&self) -> f64 {
        log_log_slope(&self.points.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>())
    }

    pub fn slope_twirl(&self) -> f64 {
        log_log_slope(&self.points.iter().map(|p| (p.0, p.2)).collect::<Vec<_>>())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "slope_ours\t{:.4}", self.slope_ours()).unwrap();
        writeln!(s, "slope_twirl\t{:.4}", self.slope_twirl()).unwrap();
        writeln!(s, "eps_gen,tvd_ours,tvd_twirl").unwrap();
        for (e, a, b) in &self.points {
            writeln!(s, "{e:e},{a:e},{b:e}").unwrap();
        }
        s
    }
}

/// Validates `m` with its infidelity scaled by each factor.
pub fn cmd_sweep(ec: &ExpandedCircuit, m: &ErrorModel, cfg: &BuildConfig, factors: &[f64]) -> Result<SweepReport, CliError> {
    let mut points = Vec::with_capacity(factors.len());
    for &f in factors {
        let r = cmd_validate(ec, &m.scaled_infidelity(f), cfg)?;
        points.push((r.eps_gen, r.tvd_ours, r.tvd_twirl));
    }
    Ok(SweepReport { points })
}

/// One line per shot: detector bits, then observable bits.
pub fn cmd_sample(dem: &DetectorErrorModel, shots: usize, seed: u64) -> Result<String, CliError> {
    if shots == 0 {
        return Err(CliError::Usage("shots must be positive".into()));
    }
    let bits = dem.num_detectors() + dem.num_observables();
    let mut s = String::with_capacity(shots * (bits + 1));
    for h in sample(dem, shots, seed)? {
        s.extend((0..bits).map(|i| if h.bit(i) { '1' } else { '0' }));
        s.push('\n');
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SensitivityRequest {
    Expectation(String),
    Event(String),
    Discard,
}

pub fn cmd_sensitivity(
    ec: &ExpandedCircuit,
    m: &ErrorModel,
    req: &SensitivityRequest,
    granularity: Granularity,
) -> Result<String, CliError> {
    let params = ParameterVector::from_model(ec, m, granularity)?;
    let (nd, no) = (ec.num_detectors(), ec.num_observables());
    let mat = match req {
        SensitivityRequest::Expectation(t) => detector_sensitivity(ec, &params, &parse_key(t, nd, no)?)?,
        SensitivityRequest::Event(t) => event_sensitivity(ec, &params, &parse_key(t, nd, no)?)?,
        SensitivityRequest::Discard => discard_sensitivity(ec, &params),
    };
    Ok(mat.to_text())
}
