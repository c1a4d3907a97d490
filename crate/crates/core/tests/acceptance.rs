//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use common::{corpus_dir, load, Difficulty, FAULTS, PROGRAMS};
use qcomb::covering::{self, verify_coverage};
use qcomb::harness::{self, Campaign, Functionality, RunConfig, SpecSource};
use qcomb::oracle::chi_square_pvalue;
use qcomb::sim::{self, apply_gate, inverse_gate, InputAssignment};
use qcomb::{Circuit, Gate, GateKind, StateVector, VerdictKind};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Column-subset coverage check written without the library's schema machinery.
fn brute_force_covered(rows: &[String], n: usize, k: usize) -> bool {
    let cells: Vec<Vec<u8>> = rows.iter().map(|r| r.bytes().collect()).collect();
    (0..n).combinations(k).all(|cols| {
        let seen: BTreeSet<Vec<u8>> = cells
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        seen.len() == 1 << k
    })
}

fn covering_soundness() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 2..=12usize {
        for k in 2..=n.min(4) {
            let seed: String = (0..n).map(|i| if i % 3 == 0 { '1' } else { '0' }).collect();
            for seeds in [vec![], vec![seed]] {
                let suite = covering::generate(n, k, &seeds).unwrap();
                let missing = verify_coverage(&suite, k);
                let seeded = seeds.iter().all(|s| suite.rows.contains(s));
                if !missing.is_empty() || !seeded || !brute_force_covered(&suite.rows, n, k) {
                    bad.push(format!("n={n} k={k} seeds={}", seeds.len()));
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(10),
        format!("{checked} suites, uncovered in {bad:?}, {elapsed:.2?} (limit 10s)"),
    )
}

fn covering_size() -> Outcome {
    let small = covering::generate(6, 2, &[]).unwrap().len();
    let large = covering::generate(11, 4, &[]).unwrap().len();
    outcome(
        small <= 8 && large <= 60,
        format!("n=6,k=2: {small} rows (<= 8); n=11,k=4: {large} rows (<= 60)"),
    )
}

fn entanglement_distribution() -> Outcome {
    let from_file = load("bell/bell.qasm");
    let built = Circuit::new(2, vec![0, 1], vec![0, 1])
        .with_gate(Gate::h(0))
        .with_gate(Gate::cx(0, 1));
    let mut worst: f64 = 0.0;
    let mut same_support = true;
    for c in [&from_file, &built] {
        let d = sim::exact_distribution::<f64>(c, &InputAssignment::new("00").unwrap()).unwrap();
        same_support &= d.keys().map(String::as_str).eq(["00", "11"]);
        for out in ["00", "11"] {
            worst = worst.max((d.get(out).copied().unwrap_or(0.0) - 0.5).abs());
        }
    }
    outcome(
        same_support && worst <= 1e-12,
        format!("input 00 -> {{00: 0.5, 11: 0.5}}, max deviation {worst:.1e} (tol 1e-12)"),
    )
}

/// Chi-square survival function in closed form for df = 1, 2, 3.
fn closed_form_sf(x: f64, df: usize) -> f64 {
    match df {
        1 => erfc((x / 2.0).sqrt()),
        2 => (-x / 2.0).exp(),
        3 => erfc((x / 2.0).sqrt()) + (2.0 * x / std::f64::consts::PI).sqrt() * (-x / 2.0).exp(),
        _ => unreachable!(),
    }
}

fn chi_square_engine() -> Outcome {
    let cases: [(f64, usize, f64, f64); 4] = [
        (3.841, 1, 0.05, 1e-3),
        (5.991, 2, 0.05, 1e-3),
        (7.815, 3, 0.05, 1e-3),
        (8.0, 1, 0.004678, 1e-5),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (x, df, target, tol) in cases {
        let p = chi_square_pvalue(x, df).unwrap();
        let reference = closed_form_sf(x, df);
        let statrs = ChiSquared::new(df as f64).unwrap().sf(x);
        let agree = (p - reference).abs() < 1e-9 && (p - statrs).abs() < 1e-9;
        pass &= (p - target).abs() <= tol && agree;
        parts.push(format!("Q({x},{df})={p:.6}"));
    }
    outcome(
        pass,
        format!(
            "{} (targets within 1e-3/1e-5, reference agreement 1e-9)",
            parts.join(" ")
        ),
    )
}

fn oracle_behaviour() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for fault in &FAULTS {
        let (mut at_two, mut by_four) = (0, 0);
        for master_seed in 0..10u64 {
            let mut campaign = Campaign::with_golden(load(fault.faulty), load(fault.golden))
                .unwrap()
                .alpha(0.01)
                .master_seed(master_seed);
            let report = campaign.run_f2(4).unwrap();
            match report.summary.k_end {
                Some(2) => {
                    at_two += 1;
                    by_four += 1;
                }
                Some(k) if k <= 4 => by_four += 1,
                _ => {}
            }
        }
        if fault.difficulty == Difficulty::Easy {
            pass &= at_two >= 9;
        }
        pass &= by_four >= 9;
        let name = fault.faulty.rsplit('/').next().unwrap();
        parts.push(format!("{name} {at_two}/{by_four}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "k_end=2 / k_end<=4 over 10 seeds: {}; {elapsed:.2?} (limit 2 min)",
            parts.join(", ")
        ),
    )
}

fn false_positives() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for program in PROGRAMS {
        let c = load(program);
        let mut campaign = Campaign::with_golden(c.clone(), c).unwrap();
        let (mut wodf, mut uof, mut total) = (0usize, 0usize, 0usize);
        for master_seed in 0..200u64 {
            campaign.set_master_seed(master_seed);
            let report = campaign.run_f1(2).unwrap();
            for r in &report.records {
                total += 1;
                match r.verdict.kind {
                    VerdictKind::Wodf => wodf += 1,
                    VerdictKind::Uof => uof += 1,
                    VerdictKind::Pass => {}
                }
            }
        }
        let rate = wodf as f64 / total as f64;
        pass &= rate <= 0.05 && uof == 0;
        let name = program.split('/').next().unwrap();
        parts.push(format!(
            "{name} {:.2}% ({wodf}/{total}, uof {uof})",
            rate * 100.0
        ));
    }
    outcome(pass, format!("wodf rate <= 5%: {}", parts.join(", ")))
}

fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> Gate {
    let kinds: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| k.arity() <= n)
        .collect();
    let kind = kinds[rng.random_range(0..kinds.len())];
    let mut qubits: Vec<usize> = (0..n).collect();
    for i in 0..kind.arity() {
        let j = rng.random_range(i..n);
        qubits.swap(i, j);
    }
    qubits.truncate(kind.arity());
    if kind.is_rotation() {
        Gate::rotation(kind, rng.random_range(-10.0..10.0), qubits[0])
    } else {
        Gate::new(kind, qubits)
    }
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let amps: Vec<Complex<f64>> = (0..1usize << n)
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Pearson statistic with sparse cells pooled so every expected count is at least 5.
fn pooled_pvalue(
    observed: &BTreeMap<String, u64>,
    expected: &BTreeMap<String, f64>,
    shots: u64,
) -> f64 {
    let mut cells: Vec<(f64, f64)> = expected
        .iter()
        .map(|(o, p)| {
            (
                observed.get(o).copied().unwrap_or(0) as f64,
                p * shots as f64,
            )
        })
        .collect();
    cells.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut pooled = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (o, e) in cells {
        o_acc += o;
        e_acc += e;
        if e_acc >= 5.0 {
            pooled.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => pooled.push((o_acc, e_acc)),
        }
    }
    if pooled.len() < 2 {
        return 1.0;
    }
    let stat: f64 = pooled.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    ChiSquared::new((pooled.len() - 1) as f64).unwrap().sf(stat)
}

fn simulator_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let n = 5;
    let mut state = random_state(&mut rng, n);
    let mut norm_err: f64 = 0.0;
    for _ in 0..10_000 {
        state = apply_gate(state, &random_gate(&mut rng, n)).unwrap();
        let norm: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        norm_err = norm_err.max((norm - 1.0).abs());
    }

    let mut inverse_err: f64 = 0.0;
    for _ in 0..2_000 {
        let s = random_state(&mut rng, 4);
        let g = random_gate(&mut rng, 4);
        let back = apply_gate(apply_gate(s.clone(), &g).unwrap(), &inverse_gate(&g)).unwrap();
        inverse_err = inverse_err.max(distance(&s, &back));
    }

    let shots = 100_000;
    let mut agreeing = 0;
    for seed in 0..100u64 {
        let mut crng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9));
        let width = crng.random_range(2..=6usize);
        let mut c = Circuit::new(width, (0..width).collect(), (0..width).collect());
        for _ in 0..crng.random_range(4..20) {
            c.push(random_gate(&mut crng, width));
        }
        let input: String = (0..width)
            .map(|_| if crng.random_bool(0.5) { '1' } else { '0' })
            .collect();
        let a = InputAssignment::new(input).unwrap();
        let expected = sim::exact_distribution::<f64>(&c, &a).unwrap();
        let h = sim::run_shots(&c, &a, shots, seed).unwrap();
        if pooled_pvalue(h.counts(), &expected, shots) >= 0.001 {
            agreeing += 1;
        }
    }

    outcome(
        norm_err <= 1e-10 && inverse_err <= 1e-10 && agreeing >= 99,
        format!(
            "norm drift {norm_err:.1e} over 1e4 gates, inverse round trip {inverse_err:.1e} (tol 1e-10); \
             sampling agrees at alpha=0.001 for {agreeing}/100 seeds (>= 99)"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        harness::RESULTS_FILE,
        harness::ASSESSMENT_FILE,
        harness::REPLAY_FILE,
    ];
    let mut pass = true;
    let mut replayed = 0;
    let configs = [
        (Functionality::F1, 3, "pairs/pairs.qasm", "pairs/pairs.qasm"),
        (
            Functionality::F2,
            4,
            "cincr/cincr_f3.qasm",
            "cincr/cincr.qasm",
        ),
        (
            Functionality::F1,
            2,
            "parity/parity_f2.qasm",
            "parity/parity.qasm",
        ),
    ];
    for (i, (functionality, strength, circuit, golden)) in configs.into_iter().enumerate() {
        let cfg = RunConfig {
            functionality,
            strength,
            alpha: 0.01,
            circuit: corpus_dir().join(circuit),
            spec: SpecSource::Golden(corpus_dir().join(golden)),
            seeds: None,
            master_seed: 0xDEAD_BEEF,
            output_dir: dir.path().join(i.to_string()),
        };
        let read = || files.map(|f| fs::read(cfg.output_dir.join(f)).unwrap());
        let first_report = harness::run(&cfg).unwrap();
        let first = read();
        harness::run(&cfg).unwrap();
        pass &= first == read();
        match harness::replay(&cfg.output_dir.join(harness::REPLAY_FILE)) {
            Ok(report) => {
                let same = report
                    .records
                    .iter()
                    .zip(&first_report.records)
                    .all(|(a, b)| a.verdict == b.verdict);
                pass &= same && report.records.len() == first_report.records.len();
                replayed += report.records.len();
            }
            Err(_) => pass = false,
        }
    }
    outcome(
        pass,
        format!(
            "3 configs run twice byte-identical; {replayed} tests replayed with identical verdicts"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("covering-array soundness", covering_soundness),
        ("covering-array size", covering_size),
        (
            "entanglement circuit distribution",
            entanglement_distribution,
        ),
        ("chi-square engine", chi_square_engine),
        ("oracle behaviour on fault corpus", oracle_behaviour),
        ("false-positive control", false_positives),
        ("simulator invariants", simulator_invariants),
        ("determinism and replay", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
