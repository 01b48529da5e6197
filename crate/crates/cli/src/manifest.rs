//! Run manifests and their content hash.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Config, Experiment};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub pass: bool,
    /// NaN (written as null) when the run failed before measuring.
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Verdict {
    /// `measured` within `tolerance` of `target`.
    pub fn within(criterion: &str, measured: f64, target: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Verdict {
            criterion: criterion.into(),
            pass: (measured - target).abs() <= tolerance,
            measured,
            target,
            tolerance,
            detail: detail.into(),
        }
    }

    /// `measured ≤ target + tolerance`.
    pub fn at_most(criterion: &str, measured: f64, target: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Verdict {
            criterion: criterion.into(),
            pass: measured <= target + tolerance,
            measured,
            target,
            tolerance,
            detail: detail.into(),
        }
    }

    pub fn failed(criterion: &str, detail: impl Into<String>) -> Self {
        Verdict {
            criterion: criterion.into(),
            pass: false,
            measured: f64::NAN,
            target: f64::NAN,
            tolerance: f64::NAN,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub schema: u32,
    pub id: String,
    pub experiment: Experiment,
    pub config: Config,
    pub started: String,
    pub finished: String,
    /// Artifact name to file name, relative to the run directory.
    pub outputs: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentRun {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(dir.join("manifest.json"), text + "\n")
    }

    pub fn read(dir: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

/// SHA-256 of the canonical JSON form of the config.
pub fn config_id(cfg: &Config) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
