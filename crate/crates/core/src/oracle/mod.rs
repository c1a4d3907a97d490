//! Program specifications and the two test oracles.
//!
//! A test fails with an *unexpected output* (uof) when any observed output
//! has specified probability zero. Otherwise it fails with a *wrong output
//! distribution* (wodf) when Pearson's goodness-of-fit test rejects the
//! specified distribution at significance level `alpha`.

mod chi2;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qasm::Circuit;
use crate::sim::{is_bitstring, OutputHistogram};

pub use chi2::{chi_square_pvalue, chi_square_statistic, gamma_q, ln_gamma};

/// Default significance level of the distribution oracle.
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Shots executed per possible output of an input.
pub const SHOTS_PER_OUTPUT: u64 = 100;

/// Allowed deviation of a specified distribution's total from 1.
pub const SPEC_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("input `{0}` is not in the program specification")]
    InputNotInSpec(String),
    #[error("observed output `{0}` has expected probability 0")]
    ZeroExpected(String),
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("chi-square needs at least 1 degree of freedom, got {0}")]
    DegreesOfFreedom(usize),
    #[error("chi-square statistic must be non-negative, got {0}")]
    NegativeStatistic(f64),
    #[error("histogram holds {found} shots, specification requires {expected}")]
    TotalMismatch { expected: u64, found: u64 },
    #[error("significance level {0} outside (0, 1)")]
    Alpha(f64),
    #[error("invalid program specification: {0}")]
    InvalidSpec(String),
    #[error("specification does not match circuit: {0}")]
    WidthMismatch(String),
    #[error("malformed specification JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl PartialEq for OracleError {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

/// Expected output distribution for each input (`PS(i, h)`).
///
/// Outputs absent from a distribution have probability zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProgramSpec {
    #[serde(rename = "inputs")]
    pub entries: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ProgramSpec {
    /// Builds a spec from raw entries, dropping explicit zero probabilities
    /// and checking every invariant.
    pub fn new(entries: BTreeMap<String, BTreeMap<String, f64>>) -> Result<Self, OracleError> {
        let mut spec = ProgramSpec { entries };
        for dist in spec.entries.values_mut() {
            dist.retain(|_, p| *p != 0.0);
        }
        spec.check()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        let raw: ProgramSpec = serde_json::from_str(text)?;
        ProgramSpec::new(raw.entries)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    fn check(&self) -> Result<(), OracleError> {
        let invalid = |msg: String| Err(OracleError::InvalidSpec(msg));
        let mut widths: Option<(usize, usize)> = None;
        for (input, dist) in &self.entries {
            if !is_bitstring(input) || input.is_empty() {
                return invalid(format!("input key `{input}` is not a bitstring"));
            }
            if dist.is_empty() {
                return invalid(format!("input `{input}` has an empty distribution"));
            }
            let mut sum = 0.0;
            for (output, &p) in dist {
                if !is_bitstring(output) || output.is_empty() {
                    return invalid(format!("output key `{output}` is not a bitstring"));
                }
                if !(p > 0.0 && p <= 1.0) {
                    return invalid(format!("PS({input}, {output}) = {p} outside (0, 1]"));
                }
                let w = (input.len(), output.len());
                match widths {
                    None => widths = Some(w),
                    Some(prev) if prev != w => {
                        return invalid(format!(
                        "inconsistent widths: `{input}`->`{output}` vs {} input / {} output bits",
                        prev.0, prev.1
                    ))
                    }
                    _ => {}
                }
                sum += p;
            }
            if (sum - 1.0).abs() > SPEC_SUM_TOLERANCE {
                return invalid(format!("distribution of `{input}` sums to {sum}"));
            }
        }
        Ok(())
    }

    /// (input width, output width), or `None` for an empty spec.
    pub fn widths(&self) -> Option<(usize, usize)> {
        let (i, dist) = self.entries.iter().next()?;
        let o = dist.keys().next()?;
        Some((i.len(), o.len()))
    }

    /// Checks the widths against the circuit's input and output declarations.
    pub fn check_circuit(&self, c: &Circuit) -> Result<(), OracleError> {
        match self.widths() {
            Some((i, o)) if i != c.num_inputs() || o != c.num_outputs() => {
                Err(OracleError::WidthMismatch(format!(
                    "spec has {i} input / {o} output bits, circuit declares {} / {}",
                    c.num_inputs(),
                    c.num_outputs()
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn distribution(&self, input: &str) -> Result<&BTreeMap<String, f64>, OracleError> {
        self.entries
            .get(input)
            .ok_or_else(|| OracleError::InputNotInSpec(input.to_string()))
    }

    /// `PS(input, output)`; zero when the output is absent.
    pub fn probability(&self, input: &str, output: &str) -> Result<f64, OracleError> {
        Ok(self
            .distribution(input)?
            .get(output)
            .copied()
            .unwrap_or(0.0))
    }

    pub fn insert(&mut self, input: String, dist: BTreeMap<String, f64>) {
        self.entries.insert(input, dist);
    }

    pub fn contains(&self, input: &str) -> bool {
        self.entries.contains_key(input)
    }
}

/// Number of shots for `input`: 100 per output with nonzero probability.
pub fn shots_for_input(spec: &ProgramSpec, input: &str) -> Result<u64, OracleError> {
    let support = spec.distribution(input)?.len() as u64;
    Ok(support * SHOTS_PER_OUTPUT)
}

/// Lexicographically smallest observed output the spec forbids, if any.
pub fn check_uof(
    spec: &ProgramSpec,
    input: &str,
    h: &OutputHistogram,
) -> Result<Option<String>, OracleError> {
    let dist = spec.distribution(input)?;
    Ok(h.iter()
        .find(|(out, _)| !dist.contains_key(*out))
        .map(|(out, _)| out.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Pass,
    Uof,
    Wodf,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Pass => "pass",
            VerdictKind::Uof => "uof",
            VerdictKind::Wodf => "wodf",
        }
    }

    pub fn is_failure(self) -> bool {
        self != VerdictKind::Pass
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for VerdictKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" => Ok(VerdictKind::Pass),
            "uof" => Ok(VerdictKind::Uof),
            "wodf" => Ok(VerdictKind::Wodf),
            other => Err(format!("unknown verdict `{other}`")),
        }
    }
}

/// Outcome of assessing one test.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Unexpected output (uof only).
    pub witness: Option<String>,
    /// Chi-square statistic, present whenever the distribution test ran.
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub alpha: f64,
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        self.kind.is_failure()
    }
}

/// Classifies one test result.
///
/// The unexpected-output check runs first; only when it passes is the
/// chi-square test applied, and only when the spec allows more than one
/// output (with a single possible output there is nothing left to test).
pub fn assess(
    spec: &ProgramSpec,
    input: &str,
    h: &OutputHistogram,
    alpha: f64,
) -> Result<Verdict, OracleError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(OracleError::Alpha(alpha));
    }
    let expected_total = shots_for_input(spec, input)?;
    if h.total() != expected_total {
        return Err(OracleError::TotalMismatch {
            expected: expected_total,
            found: h.total(),
        });
    }
    if let Some(witness) = check_uof(spec, input, h)? {
        return Ok(Verdict {
            kind: VerdictKind::Uof,
            witness: Some(witness),
            statistic: None,
            p_value: None,
            alpha,
        });
    }
    let (statistic, df) = chi_square_statistic(h, spec.distribution(input)?)?;
    if df == 0 {
        return Ok(Verdict {
            kind: VerdictKind::Pass,
            witness: None,
            statistic: None,
            p_value: None,
            alpha,
        });
    }
    let p_value = chi_square_pvalue(statistic, df)?;
    Ok(Verdict {
        kind: if p_value < alpha {
            VerdictKind::Wodf
        } else {
            VerdictKind::Pass
        },
        witness: None,
        statistic: Some(statistic),
        p_value: Some(p_value),
        alpha,
    })
}
