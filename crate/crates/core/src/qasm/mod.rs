//! Circuit model and the OpenQASM 2.0 subset it is read from and written to.
//!
//! Accepted source is one `qreg`, at most one `creg`, the sixteen gate kinds
//! of [`GateKind`], terminal `measure` statements and `//` comments. The
//! input qubits are declared by a pragma comment of the exact form
//!
//! ```text
//! // qucat inputs: 0,1
//! ```
//!
//! and the output qubits are the measured ones, ordered by classical bit.

mod emit;
mod parser;

use std::fmt;

use thiserror::Error;

pub use emit::serialize_circuit;
pub use parser::{parse_circuit, QasmError, QasmErrorKind};

/// Prefix of the input declaration pragma, including the single trailing space.
pub const INPUTS_PRAGMA: &str = "// qucat inputs: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    RX,
    RY,
    RZ,
    CX,
    CZ,
    Swap,
    CCX,
}

impl GateKind {
    pub const ALL: [GateKind; 16] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CX,
        GateKind::CZ,
        GateKind::Swap,
        GateKind::CCX,
    ];

    /// Number of qubit operands.
    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::Swap => 2,
            GateKind::CCX => 3,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }

    pub fn qasm_name(self) -> &'static str {
        match self {
            GateKind::I => "id",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::RX => "rx",
            GateKind::RY => "ry",
            GateKind::RZ => "rz",
            GateKind::CX => "cx",
            GateKind::CZ => "cz",
            GateKind::Swap => "swap",
            GateKind::CCX => "ccx",
        }
    }

    pub fn from_qasm_name(name: &str) -> Option<GateKind> {
        if name == "i" {
            return Some(GateKind::I);
        }
        GateKind::ALL.into_iter().find(|k| k.qasm_name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.qasm_name())
    }
}

/// One gate application. Controls precede targets in `operands`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<usize>,
    /// Rotation angle in radians, present iff `kind` is a rotation.
    pub angle: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: impl Into<Vec<usize>>) -> Self {
        Gate {
            kind,
            operands: operands.into(),
            angle: None,
        }
    }

    pub fn rotation(kind: GateKind, angle: f64, qubit: usize) -> Self {
        Gate {
            kind,
            operands: vec![qubit],
            angle: Some(angle),
        }
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, [q])
    }

    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, [q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::CX, [control, target])
    }

    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Gate::new(GateKind::CCX, [c0, c1, target])
    }

    pub fn rz(angle: f64, q: usize) -> Self {
        Gate::rotation(GateKind::RZ, angle, q)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(theta) = self.angle {
            write!(f, "({theta})")?;
        }
        let ops: Vec<String> = self.operands.iter().map(|q| format!("q[{q}]")).collect();
        write!(f, " {}", ops.join(","))
    }
}

/// A quantum program: gate list plus the qubits that carry inputs and outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub input_qubits: Vec<usize>,
    pub output_qubits: Vec<usize>,
}

impl Circuit {
    pub fn new(num_qubits: usize, input_qubits: Vec<usize>, output_qubits: Vec<usize>) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            input_qubits,
            output_qubits,
        }
    }

    pub fn with_gate(mut self, gate: Gate) -> Self {
        self.gates.push(gate);
        self
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn num_inputs(&self) -> usize {
        self.input_qubits.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_qubits.len()
    }

    pub fn is_valid(&self) -> bool {
        validate(self).is_empty()
    }
}

/// One violated circuit invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("circuit declares no qubits")]
    NoQubits,
    #[error("gate {gate} ({kind}) takes {expected} operands, found {found}")]
    Arity {
        gate: usize,
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("gate {gate} ({kind}) operand {qubit} out of range for {num_qubits} qubits")]
    OperandOutOfRange {
        gate: usize,
        kind: GateKind,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("gate {gate} ({kind}) has duplicate operand {qubit}")]
    DuplicateOperand {
        gate: usize,
        kind: GateKind,
        qubit: usize,
    },
    #[error("gate {gate} ({kind}) is missing its rotation angle")]
    MissingAngle { gate: usize, kind: GateKind },
    #[error("gate {gate} ({kind}) does not take an angle")]
    UnexpectedAngle { gate: usize, kind: GateKind },
    #[error("gate {gate} ({kind}) has a non-finite angle")]
    NonFiniteAngle { gate: usize, kind: GateKind },
    #[error("no input qubits declared")]
    EmptyInputs,
    #[error("no output qubits declared")]
    EmptyOutputs,
    #[error("input qubit {0} out of range")]
    InputOutOfRange(usize),
    #[error("output qubit {0} out of range")]
    OutputOutOfRange(usize),
    #[error("input qubit {0} listed twice")]
    DuplicateInput(usize),
    #[error("output qubit {0} listed twice")]
    DuplicateOutput(usize),
}

/// Checks every circuit invariant and reports one diagnostic per violation.
pub fn validate(c: &Circuit) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if c.num_qubits == 0 {
        out.push(Diagnostic::NoQubits);
    }
    for (idx, gate) in c.gates.iter().enumerate() {
        let kind = gate.kind;
        if gate.operands.len() != kind.arity() {
            out.push(Diagnostic::Arity {
                gate: idx,
                kind,
                expected: kind.arity(),
                found: gate.operands.len(),
            });
        }
        for (pos, &q) in gate.operands.iter().enumerate() {
            if q >= c.num_qubits {
                out.push(Diagnostic::OperandOutOfRange {
                    gate: idx,
                    kind,
                    qubit: q,
                    num_qubits: c.num_qubits,
                });
            }
            if gate.operands[..pos].contains(&q) {
                out.push(Diagnostic::DuplicateOperand {
                    gate: idx,
                    kind,
                    qubit: q,
                });
            }
        }
        match (kind.is_rotation(), gate.angle) {
            (true, None) => out.push(Diagnostic::MissingAngle { gate: idx, kind }),
            (true, Some(theta)) if !theta.is_finite() => {
                out.push(Diagnostic::NonFiniteAngle { gate: idx, kind })
            }
            (false, Some(_)) => out.push(Diagnostic::UnexpectedAngle { gate: idx, kind }),
            _ => {}
        }
    }
    check_qubit_set(
        &c.input_qubits,
        c.num_qubits,
        &mut out,
        Diagnostic::EmptyInputs,
        Diagnostic::InputOutOfRange,
        Diagnostic::DuplicateInput,
    );
    check_qubit_set(
        &c.output_qubits,
        c.num_qubits,
        &mut out,
        Diagnostic::EmptyOutputs,
        Diagnostic::OutputOutOfRange,
        Diagnostic::DuplicateOutput,
    );
    out
}

fn check_qubit_set(
    qubits: &[usize],
    num_qubits: usize,
    out: &mut Vec<Diagnostic>,
    empty: Diagnostic,
    out_of_range: fn(usize) -> Diagnostic,
    duplicate: fn(usize) -> Diagnostic,
) {
    if qubits.is_empty() {
        out.push(empty);
    }
    for (pos, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            out.push(out_of_range(q));
        }
        if qubits[..pos].contains(&q) {
            out.push(duplicate(q));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Circuit {
        Circuit::new(2, vec![0, 1], vec![0, 1])
            .with_gate(Gate::h(0))
            .with_gate(Gate::cx(0, 1))
    }

    #[test]
    fn bell_is_valid() {
        assert_eq!(validate(&bell()), vec![]);
    }

    #[test]
    fn operand_out_of_range() {
        let c = Circuit::new(2, vec![0], vec![0]).with_gate(Gate::x(5));
        assert_eq!(
            validate(&c),
            vec![Diagnostic::OperandOutOfRange {
                gate: 0,
                kind: GateKind::X,
                qubit: 5,
                num_qubits: 2
            }]
        );
    }

    #[test]
    fn empty_outputs() {
        let c = Circuit::new(2, vec![0], vec![]);
        assert_eq!(validate(&c), vec![Diagnostic::EmptyOutputs]);
    }

    #[test]
    fn one_diagnostic_per_violation() {
        let mut c = Circuit::new(2, vec![0, 0], vec![3]);
        c.push(Gate::cx(1, 1));
        c.push(Gate::new(GateKind::RX, [0]));
        c.push(Gate {
            kind: GateKind::H,
            operands: vec![0, 1],
            angle: Some(1.0),
        });
        let diags = validate(&c);
        assert_eq!(diags.len(), 6, "{diags:?}");
        assert!(diags.contains(&Diagnostic::DuplicateInput(0)));
        assert!(diags.contains(&Diagnostic::OutputOutOfRange(3)));
    }

    #[test]
    fn gate_names_round_trip() {
        for kind in GateKind::ALL {
            assert_eq!(GateKind::from_qasm_name(kind.qasm_name()), Some(kind));
        }
        assert_eq!(GateKind::from_qasm_name("u3"), None);
    }
}
