use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::oracle::DEFAULT_ALPHA;

use super::HarnessError;

/// Default strength for F1 (pairwise testing).
pub const DEFAULT_STRENGTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functionality {
    /// One suite of the given strength, every test executed.
    F1,
    /// Suites of strength 2, 3, … up to the given maximum, stopping at the first failure.
    F2,
}

impl fmt::Display for Functionality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Functionality::F1 => "F1",
            Functionality::F2 => "F2",
        })
    }
}

/// Where expected distributions come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecSource {
    /// A spec JSON file.
    File(PathBuf),
    /// A reference circuit whose exact distributions become the spec.
    Golden(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub functionality: Functionality,
    /// `k` for F1, the maximum strength `K` for F2.
    pub strength: usize,
    pub alpha: f64,
    pub circuit: PathBuf,
    pub spec: SpecSource,
    pub seeds: Option<PathBuf>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    functionality: Functionality,
    #[serde(default = "default_strength")]
    strength: usize,
    #[serde(default = "default_alpha")]
    alpha: f64,
    circuit: PathBuf,
    spec: Option<PathBuf>,
    golden: Option<PathBuf>,
    seeds: Option<PathBuf>,
    #[serde(default)]
    master_seed: u64,
    output_dir: PathBuf,
}

fn default_strength() -> usize {
    DEFAULT_STRENGTH
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

impl RunConfig {
    /// Parses config JSON; relative paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self, HarnessError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let spec = match (raw.spec, raw.golden) {
            (Some(s), None) => SpecSource::File(resolve(s)),
            (None, Some(g)) => SpecSource::Golden(resolve(g)),
            _ => {
                return Err(HarnessError::Config(
                    "exactly one of `spec` and `golden` must be given".into(),
                ))
            }
        };
        let cfg = RunConfig {
            functionality: raw.functionality,
            strength: raw.strength,
            alpha: raw.alpha,
            circuit: resolve(raw.circuit),
            spec,
            seeds: raw.seeds.map(resolve),
            master_seed: raw.master_seed,
            output_dir: resolve(raw.output_dir),
        };
        cfg.check_static()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::from_json(&text, base)
    }

    /// Checks that do not need the circuit.
    pub fn check_static(&self) -> Result<(), HarnessError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(HarnessError::Config(format!(
                "alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        let min = match self.functionality {
            Functionality::F1 => 1,
            Functionality::F2 => 2,
        };
        if self.strength < min {
            return Err(HarnessError::Config(format!(
                "{} needs strength >= {min}, got {}",
                self.functionality, self.strength
            )));
        }
        Ok(())
    }

    /// Checks the strength against the number of input qubits.
    pub fn check_width(&self, inputs: usize) -> Result<(), HarnessError> {
        if self.strength > inputs {
            return Err(HarnessError::Config(format!(
                "strength {} exceeds the {inputs} input qubits",
                self.strength
            )));
        }
        Ok(())
    }
}
