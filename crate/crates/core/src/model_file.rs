//! JSON model files.
//!
//! ```json
//! {"atoms": [[50, 0.25], [100, 0.75]]}
//! {"continuous": {"kind": "uniform", "lo": 10, "hi": 20, "nodes": 256}}
//! {"atoms": [[5, 0.2]],
//!  "continuous": {"kind": "tabulated", "lo": 10, "hi": 30,
//!                 "points": [[10, 0], [20, 1], [30, 0]]}}
//! ```
//!
//! `atoms` are `[degree, weight]` pairs. The continuous part, when present,
//! carries the weight the atoms leave over; its density need not be normalized.

use serde::{Deserialize, Serialize};

use crate::degree_model::{DegreeModel, ModelError, DEFAULT_NODES};

/// Upper bound on the size of a model file, in bytes.
pub const MAX_MODEL_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuous: Option<ContinuousSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContinuousKind {
    Uniform,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousSpec {
    pub kind: ContinuousKind,
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// `[k, density]` knots for `tabulated`; ignored by `uniform`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<[f64; 2]>,
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

impl ModelSpec {
    pub fn poisson(c: f64) -> Self {
        Self { atoms: vec![[c, 1.0]], continuous: None }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        if text.len() > MAX_MODEL_BYTES {
            return Err(ModelError::Parse(format!("model file exceeds {MAX_MODEL_BYTES} bytes")));
        }
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model spec serializes")
    }

    pub fn build(&self) -> Result<DegreeModel, ModelError> {
        let atoms: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a[0], a[1])).collect();
        match &self.continuous {
            None if atoms.is_empty() => Err(ModelError::Empty),
            None => DegreeModel::discrete(&atoms),
            Some(cont) => match cont.kind {
                ContinuousKind::Uniform => DegreeModel::with_density(&atoms, cont.lo, cont.hi, cont.nodes, |_| 1.0),
                ContinuousKind::Tabulated => {
                    let table: Vec<(f64, f64)> = cont.points.iter().map(|p| (p[0], p[1])).collect();
                    if table.iter().any(|(x, f)| !x.is_finite() || !f.is_finite() || *f < 0.0) {
                        return Err(ModelError::Parse("tabulated points must be finite with density >= 0".into()));
                    }
                    DegreeModel::with_table(&atoms, cont.lo, cont.hi, cont.nodes, &table)
                }
            },
        }
    }
}

/// Parses and builds a model in one step.
pub fn parse_model(text: &str) -> Result<DegreeModel, ModelError> {
    ModelSpec::from_json(text)?.build()
}
