use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::covering::{self, TestSuite};
use crate::oracle::{self, ProgramSpec, Verdict};
use crate::qasm::Circuit;
use crate::sim::{self, InputAssignment, OutputHistogram};

use super::output::Sources;
use super::{Functionality, HarnessError};

/// One executed and assessed test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRecord {
    /// Position in execution order across the whole campaign.
    pub index: usize,
    /// Strength of the suite the test came from; unknown for replayed tests.
    pub strength: Option<usize>,
    pub input: String,
    pub shots: u64,
    pub seed: u64,
    pub histogram: OutputHistogram,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSize {
    pub strength: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignSummary {
    /// Index into `records` of the first failing test.
    pub first_failure: Option<usize>,
    /// Strength of the suite holding the first failing test.
    pub k_end: Option<usize>,
    /// Tests executed, counting the failing one.
    pub executed_count: usize,
    /// Generated suites in generation order.
    pub suites: Vec<SuiteSize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub functionality: Option<Functionality>,
    pub alpha: f64,
    pub master_seed: u64,
    pub records: Vec<TestRecord>,
    pub summary: CampaignSummary,
    pub elapsed: Duration,
    /// Files the campaign was loaded from; set by the file-level runners.
    pub sources: Option<Sources>,
}

impl CampaignReport {
    pub fn failures(&self) -> impl Iterator<Item = &TestRecord> {
        self.records.iter().filter(|r| r.verdict.is_failure())
    }

    pub fn has_failure(&self) -> bool {
        self.summary.first_failure.is_some()
    }
}

/// Spec derived from `golden` by exact simulation, one entry per input.
pub fn derive_spec(golden: &Circuit, inputs: &[String]) -> Result<ProgramSpec, HarnessError> {
    let mut spec = ProgramSpec::default();
    for input in inputs {
        let a = InputAssignment::new(input.as_str())?;
        spec.insert(input.clone(), sim::exact_distribution::<f64>(golden, &a)?);
    }
    Ok(spec)
}

/// Per-test seed: the master seed XOR the test's global index.
pub fn test_seed(master_seed: u64, index: usize) -> u64 {
    master_seed ^ index as u64
}

/// A program under test paired with its oracle, independent of any files.
#[derive(Debug, Clone)]
pub struct Campaign {
    circuit: Circuit,
    spec: ProgramSpec,
    golden: Option<Circuit>,
    seeds: Vec<String>,
    alpha: f64,
    master_seed: u64,
}

impl Campaign {
    /// Tests `circuit` against a fixed spec.
    pub fn with_spec(circuit: Circuit, spec: ProgramSpec) -> Result<Self, HarnessError> {
        spec.check_circuit(&circuit)?;
        Ok(Campaign {
            circuit,
            spec,
            golden: None,
            seeds: Vec::new(),
            alpha: oracle::DEFAULT_ALPHA,
            master_seed: 0,
        })
    }

    /// Tests `circuit` against distributions derived on demand from `golden`.
    pub fn with_golden(circuit: Circuit, golden: Circuit) -> Result<Self, HarnessError> {
        if golden.num_inputs() != circuit.num_inputs()
            || golden.num_outputs() != circuit.num_outputs()
        {
            return Err(HarnessError::Config(format!(
                "golden circuit declares {} inputs / {} outputs, program under test {} / {}",
                golden.num_inputs(),
                golden.num_outputs(),
                circuit.num_inputs(),
                circuit.num_outputs()
            )));
        }
        Ok(Campaign {
            circuit,
            spec: ProgramSpec::default(),
            golden: Some(golden),
            seeds: Vec::new(),
            alpha: oracle::DEFAULT_ALPHA,
            master_seed: 0,
        })
    }

    pub fn seeds(mut self, seeds: Vec<String>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn master_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn set_master_seed(&mut self, seed: u64) {
        self.master_seed = seed;
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// The spec as used so far; with a golden circuit it holds every derived entry.
    pub fn spec(&self) -> &ProgramSpec {
        &self.spec
    }

    pub fn is_golden(&self) -> bool {
        self.golden.is_some()
    }

    fn suite(&self, k: usize) -> Result<TestSuite, HarnessError> {
        Ok(covering::generate(
            self.circuit.num_inputs(),
            k,
            &self.seeds,
        )?)
    }

    /// Makes sure the spec has an entry for every row of `suite`.
    fn cover_suite(&mut self, suite: &TestSuite) -> Result<(), HarnessError> {
        for row in &suite.rows {
            if self.spec.contains(row) {
                continue;
            }
            let Some(golden) = &self.golden else {
                return Err(HarnessError::SpecMissingInput(row.clone()));
            };
            let dist =
                sim::exact_distribution::<f64>(golden, &InputAssignment::new(row.as_str())?)?;
            self.spec.insert(row.clone(), dist);
        }
        Ok(())
    }

    fn execute(
        &self,
        index: usize,
        strength: usize,
        input: &str,
    ) -> Result<TestRecord, HarnessError> {
        let shots = oracle::shots_for_input(&self.spec, input)?;
        let seed = test_seed(self.master_seed, index);
        let histogram = sim::run_shots(&self.circuit, &InputAssignment::new(input)?, shots, seed)?;
        let verdict = oracle::assess(&self.spec, input, &histogram, self.alpha)?;
        Ok(TestRecord {
            index,
            strength: Some(strength),
            input: input.to_string(),
            shots,
            seed,
            histogram,
            verdict,
        })
    }

    /// Generates the strength-`k` suite and executes every test.
    pub fn run_f1(&mut self, k: usize) -> Result<CampaignReport, HarnessError> {
        let start = Instant::now();
        let suite = self.suite(k)?;
        self.cover_suite(&suite)?;
        let this = &*self;
        let records = suite
            .rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| this.execute(i, k, row))
            .collect::<Result<Vec<_>, _>>()?;
        let first_failure = records.iter().position(|r| r.verdict.is_failure());
        Ok(CampaignReport {
            functionality: Some(Functionality::F1),
            alpha: self.alpha,
            master_seed: self.master_seed,
            summary: CampaignSummary {
                first_failure,
                k_end: first_failure.map(|_| k),
                executed_count: records.len(),
                suites: vec![SuiteSize {
                    strength: k,
                    size: suite.len(),
                }],
            },
            records,
            elapsed: start.elapsed(),
            sources: None,
        })
    }

    /// Generates suites of strength 2..=`max_k`, assessing each test as soon
    /// as it runs and stopping at the first failure.
    pub fn run_f2(&mut self, max_k: usize) -> Result<CampaignReport, HarnessError> {
        let start = Instant::now();
        let mut records = Vec::new();
        let mut summary = CampaignSummary::default();
        'suites: for k in 2..=max_k {
            let suite = self.suite(k)?;
            self.cover_suite(&suite)?;
            summary.suites.push(SuiteSize {
                strength: k,
                size: suite.len(),
            });
            for row in &suite.rows {
                let record = self.execute(records.len(), k, row)?;
                let failed = record.verdict.is_failure();
                records.push(record);
                if failed {
                    summary.first_failure = Some(records.len() - 1);
                    summary.k_end = Some(k);
                    break 'suites;
                }
            }
        }
        summary.executed_count = records.len();
        Ok(CampaignReport {
            functionality: Some(Functionality::F2),
            alpha: self.alpha,
            master_seed: self.master_seed,
            records,
            summary,
            elapsed: start.elapsed(),
            sources: None,
        })
    }
}
