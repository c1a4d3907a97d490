#![allow(dead_code)]

use std::path::{Path, PathBuf};

use qcomb::harness;
use qcomb::Circuit;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load(rel: &str) -> Circuit {
    harness::load_circuit(&corpus_dir().join(rel))
        .unwrap_or_else(|e| panic!("{rel}: {e}"))
        .circuit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

/// A fault-injected variant of a corpus program and the inputs that expose it.
pub struct Fault {
    pub golden: &'static str,
    pub faulty: &'static str,
    pub difficulty: Difficulty,
    /// Whether input bits `x` (qubit order) make the faulty output distribution differ.
    pub triggered: fn(&[bool]) -> bool,
}

/// The correct programs in the corpus.
pub const PROGRAMS: [&str; 4] = [
    "bell/bell.qasm",
    "parity/parity.qasm",
    "pairs/pairs.qasm",
    "cincr/cincr.qasm",
];

pub const FAULTS: [Fault; 9] = [
    Fault {
        golden: "parity/parity.qasm",
        faulty: "parity/parity_f1.qasm",
        difficulty: Difficulty::Easy,
        triggered: |x| x[5],
    },
    Fault {
        golden: "parity/parity.qasm",
        faulty: "parity/parity_f2.qasm",
        difficulty: Difficulty::Medium,
        triggered: |x| x[0] && !x[2] && x[4],
    },
    Fault {
        golden: "parity/parity.qasm",
        faulty: "parity/parity_f3.qasm",
        difficulty: Difficulty::Hard,
        triggered: |x| x[1] && x[3] && !x[4] && !x[5],
    },
    Fault {
        golden: "pairs/pairs.qasm",
        faulty: "pairs/pairs_f1.qasm",
        difficulty: Difficulty::Easy,
        triggered: |_| true,
    },
    Fault {
        golden: "pairs/pairs.qasm",
        faulty: "pairs/pairs_f2.qasm",
        difficulty: Difficulty::Medium,
        triggered: |x| x[0] && !x[1] && x[2],
    },
    Fault {
        golden: "pairs/pairs.qasm",
        faulty: "pairs/pairs_f3.qasm",
        difficulty: Difficulty::Hard,
        triggered: |x| !x[0] && x[2] && x[3] && !x[5],
    },
    Fault {
        golden: "cincr/cincr.qasm",
        faulty: "cincr/cincr_f1.qasm",
        difficulty: Difficulty::Easy,
        triggered: |x| x[0],
    },
    Fault {
        golden: "cincr/cincr.qasm",
        faulty: "cincr/cincr_f2.qasm",
        difficulty: Difficulty::Medium,
        triggered: |x| x[1] && !x[3] && x[6],
    },
    Fault {
        golden: "cincr/cincr.qasm",
        faulty: "cincr/cincr_f3.qasm",
        difficulty: Difficulty::Hard,
        triggered: |x| !x[0] && x[2] && x[4] && !x[5],
    },
];

/// All `2^width` inputs, lexicographic.
pub fn all_inputs(width: usize) -> Vec<String> {
    (0..1usize << width)
        .map(|v| format!("{v:0width$b}"))
        .collect()
}

pub fn bits(s: &str) -> Vec<bool> {
    s.bytes().map(|b| b == b'1').collect()
}
