//! Campaign orchestration: configuration, execution, output files and replay.
//!
//! F1 generates one suite of strength `k` and runs every test. F2 generates
//! suites of strength 2, 3, … up to `K` and stops at the first failing test;
//! its `executed_count` counts every test of the earlier suites plus the
//! tests of the last suite up to and including the failing one.

mod campaign;
mod config;
mod output;
mod replay;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::covering::{self, CoveringError};
use crate::oracle::{OracleError, ProgramSpec, VerdictKind};
use crate::qasm::{self, Circuit, QasmError};
use crate::sim::SimError;

pub use campaign::{
    derive_spec, test_seed, Campaign, CampaignReport, CampaignSummary, SuiteSize, TestRecord,
};
pub use config::{Functionality, RunConfig, SpecSource, DEFAULT_STRENGTH};
pub use output::{
    assessment_records, emit_outputs, read_manifest, results_csv, sha256_hex, AssessmentRecord,
    ReplayManifest, ReplayTest, Sources, SpecArtifact, ASSESSMENT_FILE, DERIVED_SPEC_FILE,
    REPLAY_FILE, RESULTS_FILE,
};
pub use replay::replay;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Qasm {
        path: PathBuf,
        #[source]
        source: QasmError,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Spec {
        path: PathBuf,
        #[source]
        source: OracleError,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("program specification has no entry for input `{0}` required by the test suite")]
    SpecMissingInput(String),
    #[error("{path} changed since the campaign ran: sha256 {found}, manifest records {expected}")]
    HashMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("replayed test {index} (input {input}) gave {replayed}, manifest records {recorded}")]
    ReplayMismatch {
        index: usize,
        input: String,
        recorded: VerdictKind,
        replayed: VerdictKind,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// A parsed circuit file with its absolute path and content hash.
#[derive(Debug, Clone)]
pub struct LoadedCircuit {
    pub circuit: Circuit,
    pub path: PathBuf,
    pub sha256: String,
}

pub fn load_circuit(path: &Path) -> Result<LoadedCircuit, HarnessError> {
    let (abs, sha256, text) = output::source_file(path)?;
    let circuit = qasm::parse_circuit(&text).map_err(|source| HarnessError::Qasm {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(LoadedCircuit {
        circuit,
        path: abs,
        sha256,
    })
}

pub fn load_spec(path: &Path) -> Result<(ProgramSpec, PathBuf, String), HarnessError> {
    let (abs, sha256, text) = output::source_file(path)?;
    let spec = ProgramSpec::from_json(&text).map_err(|source| HarnessError::Spec {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((spec, abs, sha256))
}

pub fn load_seeds(path: &Path, width: usize) -> Result<Vec<String>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(covering::parse_seed_rows(&text, width)?)
}

struct Prepared {
    campaign: Campaign,
    /// Absolute path and hash of the spec file; `None` when derived from a golden circuit.
    spec_file: Option<(PathBuf, String)>,
    program: LoadedCircuit,
}

/// Loads every file `cfg` names and builds the campaign.
fn prepare(cfg: &RunConfig) -> Result<Prepared, HarnessError> {
    cfg.check_static()?;
    let program = load_circuit(&cfg.circuit)?;
    cfg.check_width(program.circuit.num_inputs())?;
    let (campaign, spec_file) = match &cfg.spec {
        SpecSource::File(path) => {
            let (spec, abs, sha) = load_spec(path)?;
            spec.check_circuit(&program.circuit)
                .map_err(|source| HarnessError::Spec {
                    path: path.clone(),
                    source,
                })?;
            (
                Campaign::with_spec(program.circuit.clone(), spec)?,
                Some((abs, sha)),
            )
        }
        SpecSource::Golden(path) => {
            let golden = load_circuit(path)?;
            (
                Campaign::with_golden(program.circuit.clone(), golden.circuit)?,
                None,
            )
        }
    };
    let seeds = match &cfg.seeds {
        Some(path) => load_seeds(path, program.circuit.num_inputs())?,
        None => Vec::new(),
    };
    let campaign = campaign
        .seeds(seeds)
        .alpha(cfg.alpha)
        .master_seed(cfg.master_seed);
    Ok(Prepared {
        campaign,
        spec_file,
        program,
    })
}

fn finish(
    mut report: CampaignReport,
    prepared: Prepared,
    cfg: &RunConfig,
) -> Result<CampaignReport, HarnessError> {
    let Prepared {
        campaign,
        spec_file,
        program,
    } = prepared;
    let spec = match spec_file {
        Some((path, sha256)) => SpecArtifact::File { path, sha256 },
        None => SpecArtifact::Derived {
            json: campaign.spec().to_json(),
        },
    };
    report.sources = Some(Sources {
        circuit_path: program.path,
        circuit_sha256: program.sha256,
        spec,
    });
    emit_outputs(&report, &cfg.output_dir)?;
    Ok(report)
}

fn expect_functionality(cfg: &RunConfig, want: Functionality) -> Result<(), HarnessError> {
    if cfg.functionality != want {
        return Err(HarnessError::Config(format!(
            "configuration selects {}, not {want}",
            cfg.functionality
        )));
    }
    Ok(())
}

/// Runs F1 as configured and writes its output files.
pub fn run_f1(cfg: &RunConfig) -> Result<CampaignReport, HarnessError> {
    expect_functionality(cfg, Functionality::F1)?;
    let mut prepared = prepare(cfg)?;
    let report = prepared.campaign.run_f1(cfg.strength)?;
    finish(report, prepared, cfg)
}

/// Runs F2 as configured and writes its output files.
pub fn run_f2(cfg: &RunConfig) -> Result<CampaignReport, HarnessError> {
    expect_functionality(cfg, Functionality::F2)?;
    let mut prepared = prepare(cfg)?;
    let report = prepared.campaign.run_f2(cfg.strength)?;
    finish(report, prepared, cfg)
}

pub fn run(cfg: &RunConfig) -> Result<CampaignReport, HarnessError> {
    match cfg.functionality {
        Functionality::F1 => run_f1(cfg),
        Functionality::F2 => run_f2(cfg),
    }
}
