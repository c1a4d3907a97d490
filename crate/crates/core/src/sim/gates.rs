use num_complex::Complex;

use crate::qasm::{Gate, GateKind};
use crate::scalar::Real;

use super::{SimError, StateVector};

type Matrix2<T> = [[Complex<T>; 2]; 2];

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

/// 2×2 unitary of a single-qubit kind, or of the target action of a controlled kind.
fn target_matrix<T: Real>(kind: GateKind, angle: Option<f64>) -> Option<Matrix2<T>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let half = angle.unwrap_or(0.0) / 2.0;
    let (cos, sin) = (half.cos(), half.sin());
    let m = match kind {
        GateKind::I => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
        GateKind::X | GateKind::CX | GateKind::CCX => {
            [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]
        }
        GateKind::Y => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        GateKind::Z | GateKind::CZ => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
        GateKind::H => [[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]],
        GateKind::S => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 1.)]],
        GateKind::Sdg => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., -1.)]],
        GateKind::T => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(s, s)]],
        GateKind::Tdg => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(s, -s)]],
        GateKind::RX => [[c(cos, 0.), c(0., -sin)], [c(0., -sin), c(cos, 0.)]],
        GateKind::RY => [[c(cos, 0.), c(-sin, 0.)], [c(sin, 0.), c(cos, 0.)]],
        GateKind::RZ => [[c(cos, -sin), c(0., 0.)], [c(0., 0.), c(cos, sin)]],
        GateKind::Swap => return None,
    };
    Some(m)
}

impl<T: Real> StateVector<T> {
    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        let n = self.num_qubits();
        if gate.operands.len() != gate.kind.arity() {
            return Err(SimError::Arity {
                kind: gate.kind,
                found: gate.operands.len(),
            });
        }
        if let Some(&q) = gate.operands.iter().find(|&&q| q >= n) {
            return Err(SimError::OperandOutOfRange {
                qubit: q,
                num_qubits: n,
            });
        }
        if gate.kind.is_rotation() && gate.angle.is_none() {
            return Err(SimError::MissingAngle(gate.kind));
        }
        let ops = &gate.operands;
        match target_matrix::<T>(gate.kind, gate.angle) {
            Some(m) => {
                let (controls, target) = ops.split_at(ops.len() - 1);
                let mask = controls.iter().fold(0usize, |acc, &q| acc | (1 << q));
                self.apply_controlled(&m, mask, target[0]);
            }
            None => self.swap_qubits(ops[0], ops[1]),
        }
        Ok(())
    }

    fn apply_controlled(&mut self, m: &Matrix2<T>, control_mask: usize, target: usize) {
        let bit = 1usize << target;
        let amps = self.amplitudes_mut();
        for i in 0..amps.len() {
            if i & bit != 0 || i & control_mask != control_mask {
                continue;
            }
            let j = i | bit;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn swap_qubits(&mut self, p: usize, q: usize) {
        let (bp, bq) = (1usize << p, 1usize << q);
        let amps = self.amplitudes_mut();
        for i in 0..amps.len() {
            if i & bp != 0 && i & bq == 0 {
                amps.swap(i, i ^ bp ^ bq);
            }
        }
    }
}

/// Returns `U_g s`.
pub fn apply_gate<T: Real>(mut s: StateVector<T>, g: &Gate) -> Result<StateVector<T>, SimError> {
    s.apply(g)?;
    Ok(s)
}

/// The gate undoing `g`.
pub fn inverse_gate(g: &Gate) -> Gate {
    let kind = match g.kind {
        GateKind::S => GateKind::Sdg,
        GateKind::Sdg => GateKind::S,
        GateKind::T => GateKind::Tdg,
        GateKind::Tdg => GateKind::T,
        other => other,
    };
    Gate {
        kind,
        operands: g.operands.clone(),
        angle: g.angle.map(|theta| -theta),
    }
}
