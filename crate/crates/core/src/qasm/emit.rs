use std::fmt::Write;

use super::{Circuit, INPUTS_PRAGMA};

/// Writes `c` back out as QASM-subset source.
///
/// Angles are printed in scientific notation with 17 significant digits so
/// that reparsing reproduces every `f64` bit for bit.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let inputs: Vec<String> = c.input_qubits.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "{INPUTS_PRAGMA}{}", inputs.join(","));
    let _ = writeln!(out, "qreg q[{}];", c.num_qubits);
    let _ = writeln!(out, "creg c[{}];", c.output_qubits.len().max(1));
    for gate in &c.gates {
        out.push_str(gate.kind.qasm_name());
        if let Some(theta) = gate.angle {
            let _ = write!(out, "({theta:.16e})");
        }
        let ops: Vec<String> = gate.operands.iter().map(|q| format!("q[{q}]")).collect();
        let _ = writeln!(out, " {};", ops.join(","));
    }
    for (bit, q) in c.output_qubits.iter().enumerate() {
        let _ = writeln!(out, "measure q[{q}] -> c[{bit}];");
    }
    out
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::super::{parse_circuit, validate, Gate, GateKind};
    use super::*;

    #[test]
    fn empty_circuit_is_declarations_only() {
        let c = Circuit::new(1, vec![0], vec![0]);
        let text = serialize_circuit(&c);
        assert_eq!(
            text,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// qucat inputs: 0\nqreg q[1];\ncreg c[1];\nmeasure q[0] -> c[0];\n"
        );
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }

    #[test]
    fn bell_round_trip() {
        let c = Circuit::new(2, vec![0, 1], vec![0, 1])
            .with_gate(Gate::h(0))
            .with_gate(Gate::cx(0, 1));
        assert_eq!(parse_circuit(&serialize_circuit(&c)).unwrap(), c);
    }

    #[test]
    fn angle_round_trips_bit_exactly() {
        let c = Circuit::new(1, vec![0], vec![0]).with_gate(Gate::rz(PI / 4.0, 0));
        let text = serialize_circuit(&c);
        assert!(text.contains("rz(7.8539816339744828e-1) q[0];"), "{text}");
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back.gates[0].angle.unwrap().to_bits(), (PI / 4.0).to_bits());
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (1usize..=6).prop_flat_map(|n| {
            let gate = (0..GateKind::ALL.len(), any::<f64>(), Just(n)).prop_filter_map(
                "need enough qubits",
                |(k, theta, n)| {
                    let kind = GateKind::ALL[k];
                    if kind.arity() > n {
                        return None;
                    }
                    let angle =
                        kind.is_rotation()
                            .then_some(if theta.is_finite() { theta } else { 0.5 });
                    Some((kind, angle))
                },
            );
            let gates = prop::collection::vec(
                (
                    gate,
                    Just(n).prop_perturb(|n, mut rng| {
                        let mut qs: Vec<usize> = (0..n).collect();
                        for i in (1..n).rev() {
                            qs.swap(i, rng.random_range(0..=i));
                        }
                        qs
                    }),
                ),
                0..12,
            );
            let subset = |n: usize| {
                Just(n).prop_perturb(|n, mut rng| {
                    let mut qs: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        qs.swap(i, rng.random_range(0..=i));
                    }
                    let keep = rng.random_range(1..=n);
                    qs.truncate(keep);
                    qs
                })
            };
            (Just(n), gates, subset(n), subset(n)).prop_map(|(n, gates, inputs, outputs)| {
                let gates = gates
                    .into_iter()
                    .map(|((kind, angle), qs)| Gate {
                        kind,
                        operands: qs[..kind.arity()].to_vec(),
                        angle,
                    })
                    .collect();
                Circuit {
                    num_qubits: n,
                    gates,
                    input_qubits: inputs,
                    output_qubits: outputs,
                }
            })
        })
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(c in arb_circuit()) {
            prop_assert!(validate(&c).is_empty());
            let back = parse_circuit(&serialize_circuit(&c)).unwrap();
            prop_assert_eq!(&back, &c);
            for (a, b) in back.gates.iter().zip(&c.gates) {
                prop_assert_eq!(a.angle.map(f64::to_bits), b.angle.map(f64::to_bits));
            }
        }
    }
}
