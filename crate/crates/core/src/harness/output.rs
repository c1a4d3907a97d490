use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::oracle::VerdictKind;

use super::campaign::CampaignReport;
use super::HarnessError;

pub const RESULTS_FILE: &str = "results.csv";
pub const ASSESSMENT_FILE: &str = "assessment.json";
pub const REPLAY_FILE: &str = "replay.json";
/// Written only when the spec was derived from a golden circuit.
pub const DERIVED_SPEC_FILE: &str = "spec.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Files a campaign was run from, for the replay manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sources {
    pub circuit_path: PathBuf,
    pub circuit_sha256: String,
    pub spec: SpecArtifact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecArtifact {
    File {
        path: PathBuf,
        sha256: String,
    },
    /// Spec JSON derived during the run; emitted next to the other outputs.
    Derived {
        json: String,
    },
}

/// One entry of `assessment.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRecord {
    pub strength: Option<usize>,
    pub input: String,
    pub shots: u64,
    pub verdict: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub statistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub seed: u64,
}

/// `replay.json`: everything needed to re-execute a campaign's tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayManifest {
    pub circuit_path: PathBuf,
    pub circuit_sha256: String,
    pub spec_path: PathBuf,
    pub spec_sha256: String,
    pub alpha: f64,
    pub tests: Vec<ReplayTest>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayTest {
    pub input: String,
    pub shots: u64,
    pub seed: u64,
    pub recorded_verdict: VerdictKind,
}

pub fn results_csv(report: &CampaignReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["strength", "input", "shots", "output", "count"])
        .expect("in-memory write");
    for r in &report.records {
        let strength = r.strength.map(|k| k.to_string()).unwrap_or_default();
        for (output, count) in r.histogram.iter() {
            w.write_record([
                strength.as_str(),
                &r.input,
                &r.shots.to_string(),
                output,
                &count.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}

pub fn assessment_records(report: &CampaignReport) -> Vec<AssessmentRecord> {
    report
        .records
        .iter()
        .map(|r| AssessmentRecord {
            strength: r.strength,
            input: r.input.clone(),
            shots: r.shots,
            verdict: r.verdict.kind,
            witness: r.verdict.witness.clone(),
            statistic: r.verdict.statistic,
            p_value: r.verdict.p_value,
            alpha: r.verdict.alpha,
            seed: r.seed,
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn absolute(path: &Path) -> Result<PathBuf, HarnessError> {
    fs::canonicalize(path).map_err(|e| HarnessError::io(path, e))
}

/// Writes `results.csv`, `assessment.json` and `replay.json` (plus the
/// derived `spec.json` when there is one) into `dir`.
///
/// Everything is staged in a scratch directory inside `dir` and only moved
/// into place once every file has been written.
pub fn emit_outputs(report: &CampaignReport, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let sources = report
        .sources
        .as_ref()
        .ok_or_else(|| HarnessError::Config("report has no source files to reference".into()))?;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let dir = absolute(dir)?;

    let mut files: Vec<(&str, String)> = Vec::new();
    let (spec_path, spec_sha256) = match &sources.spec {
        SpecArtifact::File { path, sha256 } => (path.clone(), sha256.clone()),
        SpecArtifact::Derived { json } => {
            files.push((DERIVED_SPEC_FILE, json.clone()));
            (dir.join(DERIVED_SPEC_FILE), sha256_hex(json.as_bytes()))
        }
    };
    let manifest = ReplayManifest {
        circuit_path: sources.circuit_path.clone(),
        circuit_sha256: sources.circuit_sha256.clone(),
        spec_path,
        spec_sha256,
        alpha: report.alpha,
        tests: report
            .records
            .iter()
            .map(|r| ReplayTest {
                input: r.input.clone(),
                shots: r.shots,
                seed: r.seed,
                recorded_verdict: r.verdict.kind,
            })
            .collect(),
    };
    files.push((RESULTS_FILE, results_csv(report)));
    files.push((ASSESSMENT_FILE, to_json(&assessment_records(report))));
    files.push((REPLAY_FILE, to_json(&manifest)));

    let staging = tempfile::Builder::new()
        .prefix(".qcomb-staging-")
        .tempdir_in(&dir)
        .map_err(|e| HarnessError::io(&dir, e))?;
    for (name, content) in &files {
        let path = staging.path().join(name);
        fs::write(&path, content).map_err(|e| HarnessError::io(&path, e))?;
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, _) in &files {
        let target = dir.join(name);
        fs::rename(staging.path().join(name), &target).map_err(|e| HarnessError::io(&target, e))?;
        written.push(target);
    }
    Ok(written)
}

pub fn read_manifest(path: &Path) -> Result<ReplayManifest, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

pub(crate) fn source_file(path: &Path) -> Result<(PathBuf, String, String), HarnessError> {
    let bytes = fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| HarnessError::Config(format!("{} is not valid UTF-8", path.display())))?;
    Ok((absolute(path)?, sha256_hex(text.as_bytes()), text))
}
