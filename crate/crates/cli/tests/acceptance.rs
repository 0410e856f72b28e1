//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and exits
//! nonzero unless the failing set is exactly `EXPECTED_FAILURES`.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use demforge_build::*;
use demforge_circuit::{expand, fixtures, parse_circuit, ExpandedCircuit};
use demforge_cli::{cmd_sweep, load_expanded};
use demforge_dem::{exact_distribution, serialize, DemEventKey, DetectorErrorModel, Distribution};
use demforge_errgen::*;
use demforge_oracle::*;
use demforge_pauli::PauliString;
use demforge_sensitivity::*;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 1 reproduces the published exact distribution and exact DEM, but
/// two printed sub-values are not consistent with them: P(10) = 0.0393 is a
/// rounding slip of 1 − e^{−0.04} = 0.039211, and the second-order single
/// rates 0.0368/0.0392 are not the ε² truncation 0.0392/0.0408 of the exact
/// DEM (the pair rate −0.0016 does match).
///
/// Criterion 7 fails on one of the ten models: its error falls 3.7× then 6.3×
/// per halving of θ, a θ³/θ⁴ cancellation at full strength, and steepens past
/// 2.5 further in. The other nine have slopes above 3.
const EXPECTED_FAILURES: &[u32] = &[1, 7];

const EPS: f64 = 0.01;

// criterion 1
const TOL_DIST: f64 = 5e-5;
const TOL_FIRST: f64 = 1e-6;
const TOL_SECOND: f64 = 1e-4;
const TOL_EXACT_DEM: f64 = 1e-4;
const TOL_LAMBDA: f64 = 1e-6;
const LIMIT_1: Duration = Duration::from_secs(1);
// criterion 2
const TOL_TVD_EXACT: f64 = 1e-10;
const LIMIT_2: Duration = Duration::from_secs(30);
// criterion 3
const SLOPE_RANGE: (f64, f64) = (1.3, 1.7);
const MIN_BEAT_FRACTION: f64 = 0.95;
const MIN_MEDIAN_RATIO: f64 = 5.0;
const LIMIT_3: Duration = Duration::from_secs(600);
// criterion 4
const TOL_ONE_EVENT: f64 = 1e-10;
const LIMIT_4: Duration = Duration::from_secs(60);
// criterion 5
const LIMIT_5: Duration = Duration::from_secs(60);
// criterion 6
const TOL_NEGATIVE: f64 = 1e-12;
const LIMIT_6: Duration = Duration::from_secs(120);
// criterion 7
const MIN_SENSITIVITY_SLOPE: f64 = 2.5;
const LIMIT_7: Duration = Duration::from_secs(120);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fixture(name: &str) -> ExpandedCircuit {
    expand(&fixtures::fixture(name).unwrap()).unwrap()
}

fn ampdamp_model(eps: f64) -> ErrorModel {
    let x: PauliString = "X".parse().unwrap();
    let y: PauliString = "Y".parse().unwrap();
    let mut g = SparseGenerator::new(1);
    g.add_term(Sector::S, &x, None, eps).unwrap();
    g.add_term(Sector::S, &y, None, eps).unwrap();
    g.add_term(Sector::A, &x, Some(&y), -eps).unwrap();
    let mut m = ErrorModel::noiseless();
    m.bind("I", GateNoise::post_only(g)).unwrap();
    m
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn max_diff(a: &Distribution, b: &Distribution) -> f64 {
    a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Checks `|got − want| ≤ tol`, recording failures in `bad`.
fn near(bad: &mut Vec<String>, what: &str, got: f64, want: f64, tol: f64) {
    if (got - want).abs() > tol {
        bad.push(format!("{what}={got:.6} want {want}±{tol:e}"));
    }
}

// The toy's detector 0 compares the two copies and detector 1 reads the first
// copy; the published "01" row is detector 0 firing alone.
fn criterion_1() -> Outcome {
    let ec = fixture("ampdamp-toy");
    let m = ampdamp_model(EPS);
    let key = |mask| DemEventKey::from_mask(2, 0, mask);
    let mut bad = Vec::new();

    let dist = exact_history_distribution(&ec, &m).unwrap();
    near(&mut bad, "P(01)", dist.get(0b01), 0.0377, TOL_DIST);
    near(&mut bad, "P(10)", dist.get(0b10), 0.0393, TOL_DIST);
    near(&mut bad, "P(11)", dist.get(0b11), 0.0, TOL_DIST);

    let first = build_dem(&ec, &m, &BuildConfig::leading()).unwrap();
    near(&mut bad, "first{D1}", first.probability(&key(0b01)), 0.04, TOL_FIRST);
    near(&mut bad, "first{D2}", first.probability(&key(0b10)), 0.04, TOL_FIRST);

    let second = build_dem(&ec, &m, &BuildConfig::second_order()).unwrap();
    near(&mut bad, "second{D1}", second.probability(&key(0b01)), 0.0368, TOL_SECOND);
    near(&mut bad, "second{D2}", second.probability(&key(0b10)), 0.0392, TOL_SECOND);
    near(&mut bad, "second{D1,D2}", second.probability(&key(0b11)), -0.0016, TOL_SECOND);

    let exact = estimate_dem_from_distribution(&dist).unwrap();
    near(&mut bad, "exact{D1}", exact.probability(&key(0b01)), 0.0393, TOL_EXACT_DEM);
    near(&mut bad, "exact{D2}", exact.probability(&key(0b10)), 0.0408, TOL_EXACT_DEM);
    near(&mut bad, "exact{D1,D2}", exact.probability(&key(0b11)), -0.0017, TOL_EXACT_DEM);

    // second-order polarization polynomial of detector 1: fit λ(ε) − 1 with a
    // quartic through four small ε and keep the ε and ε² coefficients
    let h = 2e-3;
    let xs: Vec<f64> = (1..=4).map(|k| k as f64 * h).collect();
    let a = DMatrix::from_fn(4, 4, |i, j| xs[i].powi(j as i32 + 1));
    let b = DVector::from_iterator(
        4,
        xs.iter().map(|&e| exact_history_distribution(&ec, &ampdamp_model(e)).unwrap().polarization(0b10) - 1.0),
    );
    let c = a.lu().solve(&b).unwrap();
    let lambda = 1.0 + c[0] * EPS + c[1] * EPS * EPS;
    near(&mut bad, "λ10", lambda, 0.9216, TOL_LAMBDA);

    let summary = format!(
        "P(01)={:.6} P(10)={:.6} second={:.4}/{:.4}/{:.4} exact={:.4}/{:.4}/{:.4} λ10={lambda:.7} (ε-coeffs {:.3}, {:.3})",
        dist.get(0b01),
        dist.get(0b10),
        second.probability(&key(0b01)),
        second.probability(&key(0b10)),
        second.probability(&key(0b11)),
        exact.probability(&key(0b01)),
        exact.probability(&key(0b10)),
        exact.probability(&key(0b11)),
        c[0],
        c[1],
    );
    if bad.is_empty() {
        outcome(true, summary)
    } else {
        outcome(false, format!("{summary}; off: {}", bad.join(", ")))
    }
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut mismatched = Vec::new();
    for (i, name) in ["rep3", "rep5"].iter().enumerate() {
        let ec = fixture(name);
        for seed in 0..10u64 {
            let mut spec = RandomModelSpec::s_only(&["CX", "R", "M", "MR"], 2e-3);
            spec.measure_flip = 1e-3;
            spec.prep_flip = 5e-4;
            let m = sample_random_cptp_model(&spec, 100 * i as u64 + seed).unwrap();
            let dem = build_dem(&ec, &m, &BuildConfig::default()).unwrap();
            let oracle = exact_history_distribution(&ec, &m).unwrap();
            worst = worst.max(exact_distribution(&dem).unwrap().tvd(&oracle).unwrap());
            if serialize(&dem) != serialize(&twirled_dem(&ec, &m).unwrap()) {
                mismatched.push(format!("{name}/{seed}"));
            }
        }
    }
    outcome(
        worst < TOL_TVD_EXACT && mismatched.is_empty(),
        format!("20 models, max TVD {worst:.2e}, twirl byte mismatches {mismatched:?}"),
    )
}

fn criterion_3() -> Outcome {
    let ec = load_expanded("rep3").unwrap();
    let factors: Vec<f64> = (0..4).map(|k| 10f64.powf(k as f64 / 3.0)).collect();
    let (mut slopes, mut ratios) = (Vec::new(), Vec::new());
    let mut beaten = 0;
    for seed in 0..20 {
        let m = sample_random_cptp_model(&RandomModelSpec::h_only(&["CX"], 1e-4), seed).unwrap();
        let r = cmd_sweep(&ec, &m, &BuildConfig::default(), &factors).unwrap();
        slopes.push(r.slope_ours());
        for &(_, ours, twirl) in &r.points {
            ratios.push(twirl / ours);
            beaten += usize::from(ours < twirl);
        }
    }
    let total = ratios.len();
    let (slope, ratio) = (median(slopes), median(ratios));
    let frac = beaten as f64 / total as f64;
    outcome(
        (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope) && frac >= MIN_BEAT_FRACTION && ratio >= MIN_MEDIAN_RATIO,
        format!("ε_gen 1e-4..1e-3, median slope {slope:.3}, ours < twirl in {beaten}/{total}, median ratio {ratio:.1}"),
    )
}

/// Random generator whose EEGs all lie in one event class of `ec`.
fn single_class_generator(ec: &ExpandedCircuit, rng: &mut ChaCha8Rng) -> (DemEventKey, SparseGenerator) {
    let n = ec.total_qubits;
    let events = ec.event_paulis();
    let mut by_class: BTreeMap<DemEventKey, Vec<PauliString>> = BTreeMap::new();
    for i in 1..(1usize << (2 * n)) {
        let p = pauli_from_index(n, i);
        let k = delta(&p, &events, ec.num_detectors());
        if !k.is_empty() {
            by_class.entry(k).or_default().push(p);
        }
    }
    let classes: Vec<_> = by_class.into_iter().collect();
    let (key, paulis) = classes.choose(rng).unwrap().clone();
    let count = rng.gen_range(1..=paulis.len().min(4));
    let chosen: Vec<PauliString> = paulis.choose_multiple(rng, count).cloned().collect();
    let mut g = SparseGenerator::new(n);
    for p in &chosen {
        g.add_term(Sector::H, p, None, rng.gen_range(-0.05..0.05)).unwrap();
        g.add_term(Sector::S, p, None, rng.gen_range(0.0..0.01)).unwrap();
    }
    for (i, p) in chosen.iter().enumerate() {
        for q in &chosen[i + 1..] {
            g.add_term(Sector::C, p, Some(q), rng.gen_range(-2e-3..2e-3)).unwrap();
            g.add_term(Sector::A, p, Some(q), rng.gen_range(-2e-3..2e-3)).unwrap();
        }
    }
    (key, g)
}

fn criterion_4() -> Outcome {
    let ghz = expand(&parse_circuit("R 0 1 2\nTICK\nCX 0 1\nTICK\nCX 0 2\nTICK\nM 0 1 2\nDETECTOR rec[-1] rec[-2]\nDETECTOR rec[-3] rec[-2]\n").unwrap())
        .unwrap();
    let circuits = [fixture("ampdamp-toy"), ghz];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let ec = &circuits[trial % 2];
        let (key, g) = single_class_generator(ec, &mut rng);
        let dist = distribution_after_generator(ec, &g).unwrap();
        let mut dem = DetectorErrorModel::new(ec.num_detectors(), ec.num_observables());
        dem.insert(key.clone(), dist.probability(&key)).unwrap();
        worst = worst.max(max_diff(&dist, &exact_distribution(&dem).unwrap()));
    }
    outcome(worst < TOL_ONE_EVENT, format!("50 generators on two 3-qubit circuits, max deviation {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let ec = fixture("rep3");
    let events = ec.event_paulis();
    let mut outside = Vec::new();
    let mut emitted = 0;
    for seed in 0..20 {
        let mut spec = RandomModelSpec::cptp(&["CX"], 1e-3, 1e-3);
        spec.measure_flip = 1e-3;
        let m = sample_random_cptp_model(&spec, seed).unwrap();
        let e1 = first_order_event_set(&propagate_model(&ec, &m).unwrap(), &events, ec.num_detectors());
        let e2 = higher_order_event_set(&e1, 2);
        for (k, _) in build_dem(&ec, &m, &BuildConfig::second_order()).unwrap().events() {
            emitted += 1;
            if !e2.contains(k) {
                outside.push(format!("{seed}:{k}"));
            }
        }
    }
    outcome(outside.is_empty(), format!("20 models, {emitted} events, outside E2: {outside:?}"))
}

fn criterion_6() -> Outcome {
    let ec = fixture("rep3");
    let mut lowest = f64::INFINITY;
    let mut offenders = 0;
    for seed in 0..100 {
        let mut spec = RandomModelSpec::cptp(&["CX"], 1e-3, 2e-3);
        spec.measure_flip = 1e-3;
        let m = sample_random_cptp_model(&spec, 1000 + seed).unwrap();
        let dem = build_dem(&ec, &m, &BuildConfig::leading()).unwrap();
        for (_, p) in dem.events() {
            lowest = lowest.min(p);
        }
        offenders += cptp_nonnegativity_check(&dem, TOL_NEGATIVE).len();
    }
    outcome(offenders == 0, format!("100 models, lowest rate {lowest:.2e}, below −{TOL_NEGATIVE:e}: {offenders}"))
}

fn criterion_7() -> Outcome {
    let ec = fixture("rep3");
    let (nd, no) = (ec.num_detectors(), ec.num_observables());
    let (mut slopes, mut shallow) = (Vec::new(), Vec::new());
    for seed in 0..10 {
        let m = sample_random_cptp_model(&RandomModelSpec::h_only(&["CX"], 2e-3), 70 + seed).unwrap();
        let params = ParameterVector::from_model(&ec, &m, Granularity::PerGate).unwrap();
        let theta = params.values();
        // the single detector most sensitive at θ
        let s = (0..nd)
            .map(|d| {
                let mut k = DemEventKey::new(nd, no);
                k.toggle_detector(d);
                detector_sensitivity(&ec, &params, &k).unwrap()
            })
            .max_by(|a, b| a.quadratic_form(&theta).abs().partial_cmp(&b.quadratic_form(&theta).abs()).unwrap())
            .unwrap();
        let SensitivityTarget::Detectors(target) = &s.target else { unreachable!() };
        let err = |alpha: f64| {
            let t: Vec<f64> = theta.iter().map(|v| alpha * v).collect();
            let d = exact_history_distribution(&ec, &params.to_model(&m, &t).unwrap()).unwrap();
            (d.polarization(target.to_mask().unwrap()) - s.evaluate(&t)).abs()
        };
        let slope = (err(1.0) / err(0.25)).log2() / 2.0;
        if slope < MIN_SENSITIVITY_SLOPE {
            // diagnostic only: the same model further into the small-θ regime
            let deeper = (err(0.25) / err(1.0 / 16.0)).log2() / 2.0;
            shallow.push(format!("model {seed}: {slope:.2}, {deeper:.2} over α ∈ {{¼, ⅟₁₆}}"));
        }
        slopes.push(slope);
    }

    // two locations of one gate, opposite rotations onto the same circuit Pauli
    let ec1 = expand(&parse_circuit("I 0\nTICK\nI 0\nTICK\nM 0\nDETECTOR rec[-1]\n").unwrap()).unwrap();
    let mut g = SparseGenerator::new(1);
    g.add(Eeg::h("X".parse().unwrap()), 0.01);
    let mut m = ErrorModel::noiseless();
    m.bind("I", GateNoise::post_only(g)).unwrap();
    let params = ParameterVector::from_model(&ec1, &m, Granularity::PerLocation).unwrap();
    let s = detector_sensitivity(&ec1, &params, &DemEventKey::from_mask(1, 0, 1)).unwrap();
    let cancel = s.quadratic_form(&[0.02, -0.02]);

    let min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        min >= MIN_SENSITIVITY_SLOPE && cancel == 0.0,
        format!(
            "10 models, min slope {min:.2}, median {:.2}, cancellation form {cancel:e}, below {MIN_SENSITIVITY_SLOPE}: {shallow:?}",
            median(slopes.clone())
        ),
    )
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.yaml");
    let mut spec = RandomModelSpec::cptp(&["CX"], 1e-3, 2e-3);
    spec.measure_flip = 2e-3;
    std::fs::write(&model, sample_random_cptp_model(&spec, 8).unwrap().to_yaml()).unwrap();
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_demforge"))
            .args(["sample", "--circuit", "surface3", "--model"])
            .arg(&model)
            .args(["--shots", "20000", "--seed", "2024"])
            .env("DEMFORGE_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let reference = run("1");
    let same = ["1", "2", "8"].iter().all(|t| run(t) == reference);
    let ones = reference.iter().filter(|&&b| b == b'1').count();
    outcome(same && ones > 0, format!("20000 shots on surface3, 1/2/8 threads and a rerun, {ones} fired bits"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome, Option<Duration>); 8] = [
        (1, "amplitude-damping golden numbers", criterion_1, Some(LIMIT_1)),
        (2, "S-only exactness", criterion_2, Some(LIMIT_2)),
        (3, "TVD scaling against the twirl", criterion_3, Some(LIMIT_3)),
        (4, "single-class generators give one event", criterion_4, Some(LIMIT_4)),
        (5, "second-order events lie in E2", criterion_5, Some(LIMIT_5)),
        (6, "CPTP models give nonnegative rates", criterion_6, Some(LIMIT_6)),
        (7, "sensitivity agreement", criterion_7, Some(LIMIT_7)),
        (8, "sampling reproducibility", criterion_8, None),
    ];
    let mut failed = Vec::new();
    for (n, name, check, limit) in criteria {
        let start = Instant::now();
        let mut o = check();
        let took = start.elapsed();
        if let Some(l) = limit.filter(|l| took > *l) {
            o.pass = false;
            o.detail.push_str(&format!("; took {took:.2?}, limit {l:?}"));
        }
        let expected = if !o.pass && EXPECTED_FAILURES.contains(&n) { " (expected)" } else { "" };
        println!(
            "criterion {n} {name}: {}{expected} [{:.2?}] {}",
            if o.pass { "PASS" } else { "FAIL" },
            took,
            o.detail
        );
        if !o.pass {
            failed.push(n);
        }
    }
    if failed == EXPECTED_FAILURES {
        ExitCode::SUCCESS
    } else {
        println!("failing criteria {failed:?}, expected {EXPECTED_FAILURES:?}");
        ExitCode::FAILURE
    }
}
