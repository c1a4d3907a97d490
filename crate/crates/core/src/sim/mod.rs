//! Dense statevector simulation with terminal measurement.
//!
//! Basis index `b` stores qubit `q` in bit `q` (qubit 0 is the least
//! significant bit). Every externally visible bitstring, inputs and outputs
//! alike, puts the lowest-indexed qubit of its register first.

mod gates;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::qasm::{Circuit, GateKind};
use crate::scalar::Real;

pub use gates::{apply_gate, inverse_gate};

/// Largest register the simulator accepts (2^24 amplitudes).
pub const MAX_QUBITS: usize = 24;

/// Probabilities below this are treated as exactly zero.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Output bitstring to probability.
pub type Distribution<T> = BTreeMap<String, T>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("circuit has {0} qubits, simulator cap is {MAX_QUBITS}")]
    QubitCap(usize),
    #[error("input assignment has {found} bits, circuit declares {expected} input qubits")]
    InputLength { expected: usize, found: usize },
    #[error("invalid bitstring `{0}`: only 0 and 1 allowed")]
    InvalidBits(String),
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    OperandOutOfRange { qubit: usize, num_qubits: usize },
    #[error("gate {kind} applied to {found} operands")]
    Arity { kind: GateKind, found: usize },
    #[error("rotation {0} without an angle")]
    MissingAngle(GateKind),
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("shot count must be at least 1")]
    NoShots,
}

/// Pure state of `n` qubits as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::NotPowerOfTwo(len));
        }
        Ok(StateVector {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    /// Σ|amplitude|².
    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Probability of each output register value, indexed so that bit `p`
    /// of the index holds `output_qubits[p]`.
    pub fn marginal(&self, output_qubits: &[usize]) -> Vec<T> {
        let mut probs = vec![T::zero(); 1 << output_qubits.len()];
        for (basis, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == T::zero() {
                continue;
            }
            let key = output_qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (pos, &q)| acc | (((basis >> q) & 1) << pos));
            probs[key] = probs[key] + p;
        }
        probs
    }
}

/// Bits assigned to the input qubits, leftmost character for `input_qubits[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputAssignment(String);

impl InputAssignment {
    pub fn new(bits: impl Into<String>) -> Result<Self, SimError> {
        let bits = bits.into();
        if !is_bitstring(&bits) {
            return Err(SimError::InvalidBits(bits));
        }
        Ok(InputAssignment(bits))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, position: usize) -> bool {
        self.0.as_bytes()[position] == b'1'
    }
}

impl fmt::Display for InputAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for InputAssignment {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InputAssignment::new(s)
    }
}

pub(crate) fn is_bitstring(s: &str) -> bool {
    s.bytes().all(|b| b == b'0' || b == b'1')
}

/// Observed output bitstrings and how often each occurred.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutputHistogram {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl OutputHistogram {
    /// Builds a histogram, dropping zero counts. Keys must be bitstrings.
    pub fn from_counts<K: Into<String>>(
        counts: impl IntoIterator<Item = (K, u64)>,
    ) -> Result<Self, SimError> {
        let mut map = BTreeMap::new();
        let mut total = 0;
        for (k, v) in counts {
            let k = k.into();
            if !is_bitstring(&k) {
                return Err(SimError::InvalidBits(k));
            }
            total += v;
            if v > 0 {
                *map.entry(k).or_insert(0) += v;
            }
        }
        Ok(OutputHistogram { counts: map, total })
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, output: &str) -> u64 {
        self.counts.get(output).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

fn check_cap(c: &Circuit) -> Result<(), SimError> {
    if c.num_qubits > MAX_QUBITS {
        return Err(SimError::QubitCap(c.num_qubits));
    }
    Ok(())
}

/// Basis state with input qubits set from `a` and every other qubit at |0⟩.
pub fn init_state<T: Real>(c: &Circuit, a: &InputAssignment) -> Result<StateVector<T>, SimError> {
    check_cap(c)?;
    if a.len() != c.input_qubits.len() {
        return Err(SimError::InputLength {
            expected: c.input_qubits.len(),
            found: a.len(),
        });
    }
    let index = c
        .input_qubits
        .iter()
        .enumerate()
        .filter(|&(pos, _)| a.bit(pos))
        .fold(0usize, |acc, (_, &q)| acc | (1 << q));
    Ok(StateVector::basis(c.num_qubits, index))
}

/// State after every gate of `c` has acted on the initial state for `a`.
pub fn final_state<T: Real>(c: &Circuit, a: &InputAssignment) -> Result<StateVector<T>, SimError> {
    let mut s = init_state(c, a)?;
    for g in &c.gates {
        s.apply(g)?;
    }
    Ok(s)
}

fn index_to_bits(index: usize, width: usize) -> String {
    (0..width)
        .map(|p| if (index >> p) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn thresholded_marginal<T: Real>(c: &Circuit, a: &InputAssignment) -> Result<Vec<T>, SimError> {
    let floor = T::from_f64_lossy(PROBABILITY_FLOOR);
    let mut probs = final_state::<T>(c, a)?.marginal(&c.output_qubits);
    for p in &mut probs {
        if *p < floor {
            *p = T::zero();
        }
    }
    Ok(probs)
}

/// Exact probability of every output bitstring, omitting entries below
/// [`PROBABILITY_FLOOR`].
pub fn exact_distribution<T: Real>(
    c: &Circuit,
    a: &InputAssignment,
) -> Result<Distribution<T>, SimError> {
    let probs = thresholded_marginal::<T>(c, a)?;
    let width = c.output_qubits.len();
    Ok(probs
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > T::zero())
        .map(|(i, p)| (index_to_bits(i, width), p))
        .collect())
}

/// Samples `n` terminal measurements of the outputs of `c` on input `a`.
///
/// The final state is computed once and `n` outcomes are drawn from its
/// output marginal, which is equivalent to `n` independent executions
/// because measurement only happens at the end. Deterministic in `seed`.
pub fn run_shots(
    c: &Circuit,
    a: &InputAssignment,
    n: u64,
    seed: u64,
) -> Result<OutputHistogram, SimError> {
    if n == 0 {
        return Err(SimError::NoShots);
    }
    let probs = thresholded_marginal::<f64>(c, a)?;
    sample_histogram(&probs, c.output_qubits.len(), n, seed)
}

/// Draws `n` categorical samples from `probs` (indexed as in
/// [`StateVector::marginal`]).
pub fn sample_histogram(
    probs: &[f64],
    width: usize,
    n: u64,
    seed: u64,
) -> Result<OutputHistogram, SimError> {
    if n == 0 {
        return Err(SimError::NoShots);
    }
    let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    let weights = WeightedIndex::new(support.iter().map(|&i| probs[i]))
        .expect("normalized statevector has positive support");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = vec![0u64; support.len()];
    for _ in 0..n {
        tally[weights.sample(&mut rng)] += 1;
    }
    OutputHistogram::from_counts(
        support
            .iter()
            .zip(tally)
            .map(|(&i, count)| (index_to_bits(i, width), count)),
    )
}
