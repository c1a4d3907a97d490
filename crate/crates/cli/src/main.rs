use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcomb::covering;
use qcomb::harness::{self, CampaignReport, HarnessError, RunConfig};

/// Combinatorial testing of quantum programs.
#[derive(Parser)]
#[command(name = "qcomb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an F1 or F2 campaign described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-execute the tests recorded in a replay.json.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Print a covering array as CSV.
    GenCa {
        /// Number of parameters; taken from --circuit when omitted.
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        strength: usize,
        /// Seeding rows that every suite must contain.
        #[arg(long)]
        seeds: Option<PathBuf>,
        /// Circuit whose input qubits name the columns.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Write the exact output distribution of a circuit for every input as a spec.
    DeriveSpec {
        #[arg(long)]
        golden: PathBuf,
        /// Destination file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a spec file is well formed and matches a circuit's widths.
    CheckSpec {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        circuit: PathBuf,
    },
}

enum Outcome {
    Clean,
    Failed,
}

fn summarize(report: &CampaignReport) -> Outcome {
    let s = &report.summary;
    for suite in &s.suites {
        println!("T_{}: {} tests", suite.strength, suite.size);
    }
    println!("executed: {}", s.executed_count);
    match s.first_failure.map(|i| &report.records[i]) {
        Some(r) => {
            let k_end = s.k_end.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
            println!(
                "first failure: input {} verdict {} (k_end {k_end})",
                r.input, r.verdict.kind
            );
            if let Some(w) = &r.verdict.witness {
                println!("  unexpected output {w}");
            }
            if let Some(p) = r.verdict.p_value {
                println!("  p-value {p:e} < alpha {}", r.verdict.alpha);
            }
            println!("failing tests: {}", report.failures().count());
            Outcome::Failed
        }
        None => {
            println!("no failures");
            Outcome::Clean
        }
    }
}

fn all_inputs(width: usize) -> Vec<String> {
    (0..1u64 << width)
        .map(|v| {
            (0..width)
                .map(|i| {
                    if v >> (width - 1 - i) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect()
        })
        .collect()
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| HarnessError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

fn execute(command: Command) -> Result<Outcome, HarnessError> {
    match command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let report = harness::run(&cfg)?;
            let outcome = summarize(&report);
            println!("outputs written to {}", cfg.output_dir.display());
            Ok(outcome)
        }
        Command::Replay { manifest } => {
            let report = harness::replay(&manifest)?;
            println!(
                "replayed {} tests, all verdicts reproduced",
                report.records.len()
            );
            Ok(summarize(&report))
        }
        Command::GenCa {
            width,
            strength,
            seeds,
            circuit,
        } => {
            let qubits = match (&circuit, width) {
                (Some(path), w) => {
                    let loaded = harness::load_circuit(path)?;
                    let inputs = loaded.circuit.input_qubits;
                    if let Some(w) = w.filter(|&w| w != inputs.len()) {
                        return Err(HarnessError::Config(format!(
                            "--width {w} disagrees with the {} input qubits of {}",
                            inputs.len(),
                            path.display()
                        )));
                    }
                    inputs
                }
                (None, Some(w)) => (0..w).collect(),
                (None, None) => {
                    return Err(HarnessError::Config(
                        "gen-ca needs --width or --circuit".into(),
                    ))
                }
            };
            let seed_rows = match &seeds {
                Some(path) => harness::load_seeds(path, qubits.len())?,
                None => Vec::new(),
            };
            let suite = covering::generate(qubits.len(), strength, &seed_rows)?;
            write_out(None, &suite.to_csv(&qubits))?;
            Ok(Outcome::Clean)
        }
        Command::DeriveSpec { golden, out } => {
            let loaded = harness::load_circuit(&golden)?;
            let spec =
                harness::derive_spec(&loaded.circuit, &all_inputs(loaded.circuit.num_inputs()))?;
            write_out(out.as_deref(), &spec.to_json())?;
            Ok(Outcome::Clean)
        }
        Command::CheckSpec { spec, circuit } => {
            let loaded = harness::load_circuit(&circuit)?;
            let (spec, _, _) = harness::load_spec(&spec)?;
            spec.check_circuit(&loaded.circuit)?;
            let width = loaded.circuit.num_inputs();
            let covered = all_inputs(width)
                .iter()
                .filter(|i| spec.contains(i))
                .count();
            println!(
                "spec matches: {covered} of {} inputs specified",
                1u64 << width
            );
            Ok(Outcome::Clean)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qcomb: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use qcomb::sim::InputAssignment;

    use super::*;

    #[test]
    fn all_inputs_in_lexicographic_order() {
        assert_eq!(all_inputs(2), ["00", "01", "10", "11"]);
        assert!(all_inputs(3)
            .iter()
            .all(|s| InputAssignment::new(s.as_str()).is_ok()));
    }
}
