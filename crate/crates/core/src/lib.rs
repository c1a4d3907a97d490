//! Combinatorial testing of quantum programs.
//!
//! The pipeline is: parse a circuit written in a small OpenQASM 2.0 subset
//! ([`qasm`]), generate a strength-k covering array over its input qubits
//! ([`covering`]), execute every row on the statevector simulator
//! ([`sim`]) for a number of shots derived from the program specification,
//! and classify each result with the unexpected-output and chi-square
//! distribution oracles ([`oracle`]). [`harness`] wires the stages together
//! and writes the campaign artifacts.
//!
//! The numeric kernels are generic over [`Real`]; the aliases below fix the
//! precision used by the harness.

pub mod covering;
pub mod harness;
pub mod oracle;
pub mod qasm;
pub mod scalar;
pub mod sim;

pub use covering::{TestSuite, ValueSchema};
pub use harness::{CampaignReport, Functionality, RunConfig};
pub use oracle::{ProgramSpec, Verdict, VerdictKind};
pub use qasm::{Circuit, Gate, GateKind};
pub use scalar::Real;
pub use sim::{InputAssignment, OutputHistogram};

/// Double precision statevector, the precision every harness path uses.
pub type StateVector = sim::StateVector<f64>;
/// Single precision statevector.
pub type StateVectorF32 = sim::StateVector<f32>;
/// Complex amplitude at double precision.
pub type Amplitude = num_complex::Complex<f64>;
/// Output distribution with double precision probabilities.
pub type Distribution = sim::Distribution<f64>;
