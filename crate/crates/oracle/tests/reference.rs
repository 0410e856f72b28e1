use demforge_build::{build_dem, BuildConfig};
use demforge_circuit::{expand, fixtures, parse_circuit, ExpandedCircuit};
use demforge_dem::{exact_distribution, serialize, DemEventKey, DetectorErrorModel, Distribution};
use demforge_errgen::*;
use demforge_oracle::*;
use demforge_pauli::PauliString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> ExpandedCircuit {
    expand(&fixtures::fixture(name).unwrap()).unwrap()
}

fn p(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn ampdamp_model(eps: f64) -> ErrorModel {
    let mut g = SparseGenerator::new(1);
    g.add_term(Sector::S, &p("X"), None, eps).unwrap();
    g.add_term(Sector::S, &p("Y"), None, eps).unwrap();
    g.add_term(Sector::A, &p("X"), Some(&p("Y")), -eps).unwrap();
    let mut m = ErrorModel::noiseless();
    m.bind("I", GateNoise::post_only(g)).unwrap();
    m
}

fn max_diff(a: &Distribution, b: &Distribution) -> f64 {
    a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn noiseless_circuits_give_a_point_mass() {
    for name in ["rep3", "ampdamp-toy"] {
        let ec = fixture(name);
        let d = dense_history_distribution(&ec, &ErrorModel::noiseless()).unwrap();
        assert!((d.get(0) - 1.0).abs() < 1e-12, "{name}");
        assert!((d.total() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn ampdamp_toy_probabilities() {
    let ec = fixture("ampdamp-toy");
    let d = exact_history_distribution(&ec, &ampdamp_model(0.01)).unwrap();
    // bit 0 is D0 (copies disagree), bit 1 is D1 (first copy decayed)
    let (p_d0, p_d1, p_both) = (d.get(0b01), d.get(0b10), d.get(0b11));
    assert!((d.total() - 1.0).abs() < 1e-12);
    assert!((p_d0 - 0.0377).abs() < 5e-5, "{p_d0}");
    assert!((p_d1 - 0.039211).abs() < 1e-6, "{p_d1}");
    assert!(p_both.abs() < 1e-12, "{p_both}");
}

#[test]
fn single_bit_flip_before_a_detector() {
    let c = parse_circuit("I 0\nTICK\nM 0\nDETECTOR rec[-1]\n").unwrap();
    let ec = expand(&c).unwrap();
    let mut g = SparseGenerator::new(1);
    g.add_term(Sector::S, &p("X"), None, 0.02).unwrap();
    let mut m = ErrorModel::noiseless();
    m.bind("I", GateNoise::post_only(g)).unwrap();
    let want = 0.5 * (1.0 - (-0.04f64).exp());
    for d in [dense_history_distribution(&ec, &m).unwrap(), pauli_frame_distribution(&ec, &m).unwrap()] {
        assert!((d.get(1) - want).abs() < 1e-14);
    }
}

#[test]
fn frame_and_dense_paths_agree() {
    let ec = fixture("rep3");
    for seed in 0..3 {
        let mut spec = RandomModelSpec::s_only(&["CX", "H"], 3e-3);
        spec.measure_flip = 1e-3;
        spec.prep_flip = 1e-3;
        let m = sample_random_cptp_model(&spec, seed).unwrap();
        let a = dense_history_distribution(&ec, &m).unwrap();
        let b = pauli_frame_distribution(&ec, &m).unwrap();
        assert!(max_diff(&a, &b) < 1e-12, "seed {seed}");
    }
}

#[test]
fn frame_path_refuses_coherent_noise() {
    let ec = fixture("rep3");
    let m = sample_random_cptp_model(&RandomModelSpec::h_only(&["CX"], 1e-3), 0).unwrap();
    assert!(matches!(pauli_frame_distribution(&ec, &m), Err(OracleError::NotPauli { .. })));
}

#[test]
fn stochastic_models_match_the_built_dem() {
    for name in ["rep3", "rep5"] {
        let ec = fixture(name);
        let mut spec = RandomModelSpec::s_only(&["CX", "H"], 2e-3);
        spec.measure_flip = 1e-3;
        let m = sample_random_cptp_model(&spec, 7).unwrap();
        let oracle = exact_history_distribution(&ec, &m).unwrap();
        let dem = build_dem(&ec, &m, &BuildConfig::default()).unwrap();
        assert!(max_diff(&oracle, &exact_distribution(&dem).unwrap()) < 1e-10, "{name}");
        assert_eq!(serialize(&dem), serialize(&twirled_dem(&ec, &m).unwrap()), "{name}");
    }
}

#[test]
fn twirl_of_a_noiseless_model_is_empty() {
    assert!(twirled_dem(&fixture("rep3"), &ErrorModel::noiseless()).unwrap().is_empty());
}

#[test]
fn twirled_coherent_model_keeps_the_leading_event_set() {
    // products of distinct H terms add twirled events only at O(h⁴)
    let ec = fixture("rep3");
    for seed in 0..5 {
        let m = sample_random_cptp_model(&RandomModelSpec::h_only(&["CX", "H"], 1e-3), seed).unwrap();
        let ours = build_dem(&ec, &m, &BuildConfig::leading()).unwrap();
        let twirl = twirled_dem(&ec, &m).unwrap();
        for (k, _) in ours.events() {
            assert!(twirl.probability(k) > 0.0, "seed {seed}: {k}");
        }
        for (k, v) in twirl.events() {
            if ours.probability(k) == 0.0 {
                assert!(v.abs() < 1e-6, "seed {seed}: {k} {v}");
            }
        }
    }
}

#[test]
fn estimate_round_trips_random_dems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut dem = DetectorErrorModel::new(3, 0);
        for mask in 1..8u64 {
            if rng.gen_bool(0.7) {
                dem.insert(DemEventKey::from_mask(3, 0, mask), rng.gen_range(-0.02..0.08)).unwrap();
            }
        }
        let back = estimate_dem_from_distribution(&exact_distribution(&dem).unwrap()).unwrap();
        for mask in 1..8u64 {
            let k = DemEventKey::from_mask(3, 0, mask);
            assert!((back.probability(&k) - dem.probability(&k)).abs() < 1e-10);
        }
    }
}

#[test]
fn ampdamp_toy_exact_dem() {
    let ec = fixture("ampdamp-toy");
    let d = exact_history_distribution(&ec, &ampdamp_model(0.01)).unwrap();
    let dem = estimate_dem_from_distribution(&d).unwrap();
    let get = |m| dem.probability(&DemEventKey::from_mask(2, 0, m));
    assert!((get(0b01) - 0.0393).abs() < 1e-4, "{}", get(0b01));
    assert!((get(0b10) - 0.0408).abs() < 1e-4, "{}", get(0b10));
    assert!((get(0b11) + 0.0017).abs() < 1e-4, "{}", get(0b11));
}

#[test]
fn one_class_generator_gives_one_event() {
    // S_X on the first copy plus an H term along the same fault
    let ec = fixture("ampdamp-toy");
    let n = ec.total_qubits;
    let mut g = SparseGenerator::new(n);
    let x1 = PauliString::single(n, 1, demforge_pauli::Pauli::X).unwrap();
    g.add(Eeg::s(x1.clone()), 0.01);
    g.add(Eeg::h(x1), 0.05);
    let d = distribution_after_generator(&ec, &g).unwrap();
    assert!((d.total() - 1.0).abs() < 1e-12);
    let nonzero: Vec<usize> = (0..4).filter(|&h| d.get(h as u64).abs() > 1e-14).collect();
    assert_eq!(nonzero.len(), 2);
}

#[test]
fn dense_state_cap() {
    let ec = fixture("surface3");
    let m = sample_random_cptp_model(&RandomModelSpec::h_only(&["CX"], 1e-3), 0).unwrap();
    assert!(matches!(exact_history_distribution(&ec, &m), Err(OracleError::TooManyQubits { .. })));
}
