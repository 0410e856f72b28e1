use demforge_circuit::fixtures::{fixture, repetition_code};
use demforge_circuit::{expand, ideal_final_state, parse_circuit, Circuit, OpKind, SiteKind};
use demforge_pauli::{conjugate_sequence, Gate, Pauli, PauliString};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Pauli frame on the original (unexpanded) circuit, simulated measurement by measurement.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Fault {
    Before(usize),
    After(usize),
    FlipRecordOf(usize),
}

fn frame_detectors(c: &Circuit, fault: Fault, qubit: usize, p: Pauli) -> Vec<bool> {
    let n = c.num_qubits;
    let mut x = vec![false; n];
    let mut z = vec![false; n];
    let mut recs = Vec::new();
    let inject = |x: &mut Vec<bool>, z: &mut Vec<bool>| {
        let (px, pz) = match p {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        };
        x[qubit] ^= px;
        z[qubit] ^= pz;
    };
    for (i, op) in c.operations().enumerate() {
        if fault == Fault::Before(i) {
            inject(&mut x, &mut z);
        }
        let t = &op.targets;
        match op.kind {
            OpKind::Gate(g) => match g {
                Gate::H => {
                    let q = t[0];
                    std::mem::swap(&mut x[q], &mut z[q]);
                }
                Gate::S | Gate::SDag => z[t[0]] ^= x[t[0]],
                Gate::X | Gate::Y | Gate::Z => {}
                Gate::CX => {
                    x[t[1]] ^= x[t[0]];
                    z[t[0]] ^= z[t[1]];
                }
                Gate::CZ => {
                    z[t[1]] ^= x[t[0]];
                    z[t[0]] ^= x[t[1]];
                }
                Gate::Swap => {
                    x.swap(t[0], t[1]);
                    z.swap(t[0], t[1]);
                }
            },
            OpKind::I => {}
            OpKind::R => {
                x[t[0]] = false;
                z[t[0]] = false;
            }
            OpKind::M | OpKind::MR => {
                let mut flip = x[t[0]];
                if fault == Fault::FlipRecordOf(i) {
                    flip ^= true;
                }
                recs.push(flip);
                if op.kind == OpKind::MR {
                    x[t[0]] = false;
                    z[t[0]] = false;
                }
            }
        }
        if fault == Fault::After(i) {
            inject(&mut x, &mut z);
        }
    }
    c.detectors
        .iter()
        .chain(&c.observables)
        .map(|d| d.iter().fold(false, |acc, &r| acc ^ recs[r]))
        .collect()
}

fn check_single_fault_equivalence(c: &Circuit) {
    let ec = expand(c).unwrap();
    let events = ec.event_paulis();
    let mut checked = 0;
    for site in &ec.noise_sites {
        for (j, &q) in site.qubits.iter().enumerate() {
            if !site.active[j] {
                continue;
            }
            let paulis: &[Pauli] = match site.kind {
                SiteKind::Pre | SiteKind::Post => &[Pauli::X, Pauli::Y, Pauli::Z],
                _ => &[Pauli::X],
            };
            for &p in paulis {
                let fault = PauliString::single(ec.total_qubits, q, p).unwrap();
                let moved = conjugate_sequence(&ec.clifford_sequence[site.position..], &fault).unwrap();
                let expanded: Vec<bool> = events.iter().map(|d| !d.commutes(&moved).unwrap()).collect();
                let (where_, orig_q) = match site.kind {
                    SiteKind::Pre => (Fault::Before(site.op_index), c.operations().nth(site.op_index).unwrap().targets[j]),
                    SiteKind::Post | SiteKind::PrepFlip => (Fault::After(site.op_index), c.operations().nth(site.op_index).unwrap().targets[j]),
                    SiteKind::MeasureFlip => (Fault::FlipRecordOf(site.op_index), 0),
                };
                let original = frame_detectors(c, where_, orig_q, if site.kind == SiteKind::MeasureFlip { Pauli::I } else { p });
                assert_eq!(expanded, original, "site {:?} {:?} qubit {q} {p:?}", site.kind, site.label);
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn single_faults_match_pauli_frame_on_fixtures() {
    for name in ["rep3", "rep5", "surface3", "ampdamp-toy"] {
        check_single_fault_equivalence(&fixture(name).unwrap());
    }
}

#[test]
fn single_faults_match_pauli_frame_on_random_circuits() {
    let mut rng = StdRng::seed_from_u64(99);
    let mut done = 0;
    while done < 30 {
        let n = rng.gen_range(2..=4);
        let mut text = String::new();
        let mut meas = 0usize;
        for _ in 0..rng.gen_range(3..12) {
            match rng.gen_range(0..7) {
                0 => text += &format!("H {}\n", rng.gen_range(0..n)),
                1 => text += &format!("S {}\n", rng.gen_range(0..n)),
                2 | 3 => {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    text += &format!("{} {a} {b}\n", if rng.gen_bool(0.5) { "CX" } else { "CZ" });
                }
                4 => {
                    text += &format!("MR {}\n", rng.gen_range(0..n));
                    meas += 1;
                }
                5 => {
                    text += &format!("M {}\n", rng.gen_range(0..n));
                    meas += 1;
                }
                _ => text += &format!("R {}\n", rng.gen_range(0..n)),
            }
        }
        text += "M";
        for q in 0..n {
            text += &format!(" {q}");
        }
        text += "\n";
        meas += n;
        let c0 = parse_circuit(&text).unwrap();
        // keep only single-record detectors that are deterministic
        let ec0 = expand(&c0).unwrap();
        let tab = ideal_final_state(&ec0);
        let mut det = String::new();
        for r in 0..meas {
            let mut z = PauliString::identity(ec0.total_qubits);
            z.set(ec0.record_qubits[r], Pauli::Z).unwrap();
            if tab.expectation(&z) != 0 {
                det += &format!("DETECTOR rec[-{}]\n", meas - r);
            }
        }
        if det.is_empty() {
            continue;
        }
        let c = parse_circuit(&(text + &det)).unwrap();
        check_single_fault_equivalence(&c);
        done += 1;
    }
}

#[test]
fn fixture_expansions() {
    let cases = [("rep3", 7, 6), ("rep5", 13, 12), ("surface3", 25, 16), ("ampdamp-toy", 3, 2)];
    for (name, total, dets) in cases {
        let c = fixture(name).unwrap();
        let ec = expand(&c).unwrap();
        assert_eq!(ec.total_qubits, total, "{name}");
        assert_eq!(ec.num_detectors(), dets, "{name}");
        let mid = c
            .operations()
            .enumerate()
            .filter(|(i, op)| {
                op.kind.is_measurement()
                    && c.operations().skip(i + 1).any(|o| o.targets.contains(&op.targets[0]))
            })
            .count();
        assert_eq!(ec.total_qubits, c.num_qubits + mid, "{name}: one virtual qubit per mid-circuit measurement");
        let tab = ideal_final_state(&ec);
        let events = ec.event_paulis();
        for (i, d) in events.iter().enumerate() {
            assert_eq!(tab.expectation(d), 1, "{name} detector {i}");
            for e in &events {
                assert!(d.commutes(e).unwrap());
            }
        }
    }
}

#[test]
fn toy_detectors_are_single_z_on_the_copies() {
    let ec = expand(&fixture("ampdamp-toy").unwrap()).unwrap();
    assert_eq!(ec.detector_paulis[0], "IIZ".parse().unwrap());
    assert_eq!(ec.detector_paulis[1], "-IZI".parse().unwrap());
    let x0 = PauliString::single(3, 0, Pauli::X).unwrap();
    let moved = conjugate_sequence(&ec.clifford_sequence[1..], &x0).unwrap();
    // an X before the first copy flips that copy and the data qubit, so the
    // comparison detector sees no change
    let flips: Vec<bool> = ec.detector_paulis.iter().map(|d| !d.commutes(&moved).unwrap()).collect();
    assert_eq!(flips, vec![false, true]);
    let moved = conjugate_sequence(&ec.clifford_sequence[2..], &x0).unwrap();
    let flips: Vec<bool> = ec.detector_paulis.iter().map(|d| !d.commutes(&moved).unwrap()).collect();
    assert_eq!(flips, vec![true, false]);
}

#[test]
fn repetition_generator_is_parametric() {
    let c = parse_circuit(&repetition_code(7, 3)).unwrap();
    assert_eq!(c.num_detectors(), (3 + 1) * 6);
    let ec = expand(&c).unwrap();
    assert_eq!(ec.total_qubits, 13 + 2 * 6);
}

#[test]
fn fixture_text_round_trips() {
    for name in ["rep3", "surface3", "ampdamp-toy"] {
        let c = fixture(name).unwrap();
        assert_eq!(parse_circuit(&c.to_text()).unwrap(), c);
    }
}
