//! Run manifests: everything needed to regenerate a command's outputs.
//!
//! A manifest is written next to the primary output as
//! `<stem>.manifest.json`. Output paths are stored as bare file names,
//! relative to the manifest's directory, so a run directory can be moved or
//! replayed elsewhere.

use serde::{Deserialize, Serialize};

use crate::eigen::MatrixKind;
use crate::model_file::ModelSpec;

pub const MANIFEST_SUFFIX: &str = ".manifest.json";
/// Upper bound on the size of a manifest file, in bytes.
pub const MAX_MANIFEST_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    /// Version of the tool that wrote the manifest.
    pub version: String,
    pub model: ModelSpec,
    pub base_seed: u64,
    pub run: RunCommand,
    /// File names of the outputs, primary output first.
    pub outputs: Vec<String>,
}

/// Ensemble parameters shared by the Monte Carlo commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleParams {
    pub n: usize,
    pub replicates: usize,
}

/// `steps` equally spaced hub degrees from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.lo],
            s => (0..s)
                .map(|i| if i == s - 1 { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / (s - 1) as f64 })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase", deny_unknown_fields)]
pub enum RunCommand {
    Density {
        zmin: f64,
        zmax: f64,
        points: usize,
        eta: Option<f64>,
        svg: bool,
    },
    Empirical {
        n: usize,
        replicates: usize,
        bins: usize,
        kind: MatrixKind,
        range: Option<[f64; 2]>,
        eigenvalues: bool,
        svg: bool,
    },
    Leading {
        empirical: Option<EnsembleParams>,
    },
    Hub {
        kn: Option<f64>,
        sweep: Option<Sweep>,
        empirical: Option<EnsembleParams>,
        svg: bool,
    },
    Sample {
        n: usize,
        hubs: Vec<f64>,
    },
}

impl RunCommand {
    pub fn name(&self) -> &'static str {
        match self {
            RunCommand::Density { .. } => "density",
            RunCommand::Empirical { .. } => "empirical",
            RunCommand::Leading { .. } => "leading",
            RunCommand::Hub { .. } => "hub",
            RunCommand::Sample { .. } => "sample",
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ManifestError {
    #[error("manifest exceeds {MAX_MANIFEST_BYTES} bytes")]
    TooLarge,
    #[error("invalid manifest: {0}")]
    Parse(String),
    #[error("invalid output name {0:?}: must be a bare file name")]
    OutputName(String),
}

impl RunManifest {
    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        if text.len() > MAX_MANIFEST_BYTES {
            return Err(ManifestError::TooLarge);
        }
        let manifest: Self = serde_json::from_str(text).map_err(|e| ManifestError::Parse(e.to_string()))?;
        if manifest.outputs.is_empty() {
            return Err(ManifestError::Parse("no outputs listed".into()));
        }
        for name in &manifest.outputs {
            if !is_bare_file_name(name) {
                return Err(ManifestError::OutputName(name.clone()));
            }
        }
        Ok(manifest)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Stem of the primary output, used to name the manifest itself.
    pub fn stem(&self) -> &str {
        let primary = &self.outputs[0];
        primary.rsplit_once('.').map_or(primary.as_str(), |(stem, _)| stem)
    }

    pub fn file_name(&self) -> String {
        format!("{}{MANIFEST_SUFFIX}", self.stem())
    }
}

/// Rejects anything that could escape the manifest directory.
fn is_bare_file_name(name: &str) -> bool {
    !name.is_empty()
        && name != "."
        && name != ".."
        && !name.contains(['/', '\\', '\0'])
        && !name.starts_with(MANIFEST_SUFFIX)
}
