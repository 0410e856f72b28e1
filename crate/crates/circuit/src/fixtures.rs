//! Canonical circuits used by tests and the command line.

use std::fmt::Write;

use crate::ir::Circuit;
use crate::parse::parse_circuit;

pub const NAMES: [&str; 4] = ["rep3", "rep5", "surface3", "ampdamp-toy"];

/// Text of a named fixture.
pub fn fixture_text(name: &str) -> Option<String> {
    match name {
        "rep3" => Some(repetition_code(3, 2)),
        "rep5" => Some(repetition_code(5, 2)),
        "surface3" => Some(rotated_surface_code(3, 2)),
        "ampdamp-toy" => Some(AMPDAMP_TOY.to_string()),
        _ => None,
    }
}

pub fn fixture(name: &str) -> Option<Circuit> {
    fixture_text(name).map(|t| parse_circuit(&t).expect("fixtures parse"))
}

/// One data qubit prepared in |1> and copied twice onto fresh qubits, with an
/// idle slot before each copy. Detector 0 compares the two copies, detector 1
/// checks the first copy.
const AMPDAMP_TOY: &str = "\
X 0
TICK
I 0
TICK
CX 0 1
TICK
I 0
TICK
CX 0 2
TICK
CX 1 2
TICK
M 1 2
DETECTOR rec[-1]
DETECTOR rec[-2]
";

/// Bit-flip repetition code memory: data `0..d`, ancillas `d..2d-1`.
pub fn repetition_code(d: usize, rounds: usize) -> String {
    assert!(d >= 2 && rounds >= 1);
    let data: Vec<usize> = (0..d).collect();
    let anc: Vec<usize> = (d..2 * d - 1).collect();
    let mut s = String::new();
    let all: Vec<String> = (0..2 * d - 1).map(|q| q.to_string()).collect();
    writeln!(s, "R {}", all.join(" ")).unwrap();
    for r in 0..rounds {
        writeln!(s, "TICK").unwrap();
        let pairs: Vec<String> = anc.iter().enumerate().map(|(i, a)| format!("{} {a}", data[i])).collect();
        writeln!(s, "CX {}", pairs.join(" ")).unwrap();
        writeln!(s, "TICK").unwrap();
        let pairs: Vec<String> = anc.iter().enumerate().map(|(i, a)| format!("{} {a}", data[i + 1])).collect();
        writeln!(s, "CX {}", pairs.join(" ")).unwrap();
        writeln!(s, "TICK").unwrap();
        let a: Vec<String> = anc.iter().map(|q| q.to_string()).collect();
        writeln!(s, "MR {}", a.join(" ")).unwrap();
        let m = anc.len();
        for i in 0..m {
            if r == 0 {
                writeln!(s, "DETECTOR rec[-{}]", m - i).unwrap();
            } else {
                writeln!(s, "DETECTOR rec[-{}] rec[-{}]", m - i, 2 * m - i).unwrap();
            }
        }
    }
    writeln!(s, "TICK").unwrap();
    let dq: Vec<String> = data.iter().map(|q| q.to_string()).collect();
    writeln!(s, "M {}", dq.join(" ")).unwrap();
    let m = anc.len();
    for i in 0..m {
        writeln!(s, "DETECTOR rec[-{}] rec[-{}] rec[-{}]", d - i, d - i - 1, d + m - i).unwrap();
    }
    writeln!(s, "OBSERVABLE_INCLUDE(0) rec[-{d}]").unwrap();
    s
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Basis {
    X,
    Z,
}

/// Rotated surface code Z-basis memory. Data at odd coordinates, ancillas at even
/// coordinates. X-type checks are measured in their own four CX layers before
/// the Z-type checks.
pub fn rotated_surface_code(d: usize, rounds: usize) -> String {
    assert!(d >= 3 && d % 2 == 1 && rounds >= 1);
    let size = 2 * d;
    let data_index = |x: usize, y: usize| ((y - 1) / 2) * d + (x - 1) / 2;
    let mut checks: Vec<(usize, usize, Basis)> = Vec::new();
    for y in (0..=size).step_by(2) {
        for x in (0..=size).step_by(2) {
            let basis = if (x / 2 + y / 2) % 2 == 1 { Basis::X } else { Basis::Z };
            let interior_x = x > 0 && x < size;
            let interior_y = y > 0 && y < size;
            let keep = (interior_x && interior_y)
                || (interior_x && (y == 0 || y == size) && basis == Basis::X)
                || (interior_y && (x == 0 || x == size) && basis == Basis::Z);
            if keep {
                checks.push((x, y, basis));
            }
        }
    }
    let nd = d * d;
    let anc_q = |i: usize| nd + i;
    // Corner order NW, NE, SW, SE for X checks and NW, SW, NE, SE for Z checks.
    let corner = |x: usize, y: usize, k: usize, b: Basis| -> Option<usize> {
        let order: [(isize, isize); 4] = match b {
            Basis::X => [(-1, -1), (1, -1), (-1, 1), (1, 1)],
            Basis::Z => [(-1, -1), (-1, 1), (1, -1), (1, 1)],
        };
        let (dx, dy) = order[k];
        let (cx, cy) = (x as isize + dx, y as isize + dy);
        if cx < 1 || cy < 1 || cx >= size as isize || cy >= size as isize {
            None
        } else {
            Some(data_index(cx as usize, cy as usize))
        }
    };

    let mut s = String::new();
    let total = nd + checks.len();
    let all: Vec<String> = (0..total).map(|q| q.to_string()).collect();
    writeln!(s, "R {}", all.join(" ")).unwrap();
    let xs: Vec<usize> = (0..checks.len()).filter(|&i| checks[i].2 == Basis::X).collect();
    let zs: Vec<usize> = (0..checks.len()).filter(|&i| checks[i].2 == Basis::Z).collect();
    let anc_list = |v: &[usize]| v.iter().map(|&i| anc_q(i).to_string()).collect::<Vec<_>>().join(" ");
    let nchecks = checks.len();

    for r in 0..rounds {
        writeln!(s, "TICK\nH {}", anc_list(&xs)).unwrap();
        for k in 0..4 {
            let pairs: Vec<String> = xs
                .iter()
                .filter_map(|&i| corner(checks[i].0, checks[i].1, k, Basis::X).map(|dq| format!("{} {dq}", anc_q(i))))
                .collect();
            writeln!(s, "TICK\nCX {}", pairs.join(" ")).unwrap();
        }
        writeln!(s, "TICK\nH {}", anc_list(&xs)).unwrap();
        for k in 0..4 {
            let pairs: Vec<String> = zs
                .iter()
                .filter_map(|&i| corner(checks[i].0, checks[i].1, k, Basis::Z).map(|dq| format!("{dq} {}", anc_q(i))))
                .collect();
            writeln!(s, "TICK\nCX {}", pairs.join(" ")).unwrap();
        }
        let all_anc: Vec<usize> = (0..nchecks).collect();
        writeln!(s, "TICK\nMR {}", anc_list(&all_anc)).unwrap();
        for i in 0..nchecks {
            let back = nchecks - i;
            if r == 0 {
                if checks[i].2 == Basis::Z {
                    writeln!(s, "DETECTOR rec[-{back}]").unwrap();
                }
            } else {
                writeln!(s, "DETECTOR rec[-{back}] rec[-{}]", back + nchecks).unwrap();
            }
        }
    }
    let dq: Vec<String> = (0..nd).map(|q| q.to_string()).collect();
    writeln!(s, "TICK\nM {}", dq.join(" ")).unwrap();
    for &i in &zs {
        let mut recs = vec![format!("rec[-{}]", nd + nchecks - i)];
        for k in 0..4 {
            if let Some(q) = corner(checks[i].0, checks[i].1, k, Basis::Z) {
                recs.push(format!("rec[-{}]", nd - q));
            }
        }
        writeln!(s, "DETECTOR {}", recs.join(" ")).unwrap();
    }
    let row: Vec<String> = (0..d).map(|c| format!("rec[-{}]", nd - data_index(2 * c + 1, 1))).collect();
    writeln!(s, "OBSERVABLE_INCLUDE(0) {}", row.join(" ")).unwrap();
    s
}
