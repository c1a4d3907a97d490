use std::path::Path;
use std::time::Instant;

use crate::oracle;
use crate::sim::{self, InputAssignment};

use super::campaign::{CampaignReport, CampaignSummary, TestRecord};
use super::output::{read_manifest, source_file, Sources, SpecArtifact};
use super::{HarnessError, LoadedCircuit};

fn check_hash(path: &Path, expected: &str, found: &str) -> Result<(), HarnessError> {
    if expected != found {
        return Err(HarnessError::HashMismatch {
            path: path.to_path_buf(),
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// Re-executes the `(input, shots, seed)` triples of a replay manifest and
/// checks that every verdict matches the recorded one.
///
/// Fails if the referenced circuit or spec no longer hash to the recorded
/// values.
pub fn replay(manifest_path: &Path) -> Result<CampaignReport, HarnessError> {
    let start = Instant::now();
    let manifest = read_manifest(manifest_path)?;

    let (_, circuit_sha, _) = source_file(&manifest.circuit_path)?;
    check_hash(
        &manifest.circuit_path,
        &manifest.circuit_sha256,
        &circuit_sha,
    )?;
    let (_, spec_sha, _) = source_file(&manifest.spec_path)?;
    check_hash(&manifest.spec_path, &manifest.spec_sha256, &spec_sha)?;

    let LoadedCircuit {
        circuit,
        path,
        sha256,
    } = super::load_circuit(&manifest.circuit_path)?;
    let (spec, spec_path, _) = super::load_spec(&manifest.spec_path)?;
    spec.check_circuit(&circuit)?;

    let mut records = Vec::with_capacity(manifest.tests.len());
    for (index, test) in manifest.tests.iter().enumerate() {
        let input = InputAssignment::new(test.input.as_str())?;
        let histogram = sim::run_shots(&circuit, &input, test.shots, test.seed)?;
        let verdict = oracle::assess(&spec, &test.input, &histogram, manifest.alpha)?;
        if verdict.kind != test.recorded_verdict {
            return Err(HarnessError::ReplayMismatch {
                index,
                input: test.input.clone(),
                recorded: test.recorded_verdict,
                replayed: verdict.kind,
            });
        }
        records.push(TestRecord {
            index,
            strength: None,
            input: test.input.clone(),
            shots: test.shots,
            seed: test.seed,
            histogram,
            verdict,
        });
    }
    let first_failure = records.iter().position(|r| r.verdict.is_failure());
    Ok(CampaignReport {
        functionality: None,
        alpha: manifest.alpha,
        master_seed: 0,
        summary: CampaignSummary {
            first_failure,
            k_end: None,
            executed_count: records.len(),
            suites: Vec::new(),
        },
        records,
        elapsed: start.elapsed(),
        sources: Some(Sources {
            circuit_path: path,
            circuit_sha256: sha256,
            spec: SpecArtifact::File {
                path: spec_path,
                sha256: spec_sha,
            },
        }),
    })
}
