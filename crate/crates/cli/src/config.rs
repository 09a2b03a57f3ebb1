//! Pipeline configuration.
//!
//! ```json
//! {
//!   "method": "count_based",
//!   "params": { "c": 6.0, "mode": "per_group" },
//!   "floor": 0.0,
//!   "selection": "top_k",
//!   "k": 2,
//!   "seed": 7,
//!   "group_column": "group"
//! }
//! ```
//!
//! `method` is one of `count_based`, `multiplicative_bias`, `shift_spread`,
//! `human_centric`, or `as_given` for ranges read from the input file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use poset_screen::{GroupSummary, IntervalPolicy};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

pub const AS_GIVEN: &str = "as_given";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    Cutoff,
    TopK,
}

/// One bar for scalar intervals, or one per attribute for boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    Single(f64),
    PerAttribute(Vec<f64>),
}

impl Cutoff {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Cutoff::Single(x) => vec![*x],
            Cutoff::PerAttribute(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub method: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub floor: f64,
    pub selection: SelectionMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<Cutoff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<ClusterSpec>,
    /// Group summaries to use instead of the ones computed from the pool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_stats: Option<BTreeMap<String, GroupSummary<f64>>>,
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.selection {
            SelectionMode::Cutoff => {
                let Some(cutoff) = &self.cutoff else {
                    return invalid("cutoff selection needs `cutoff`");
                };
                if self.k.is_some() {
                    return invalid("`k` is only used with top_k selection");
                }
                if cutoff.values().is_empty() || cutoff.values().iter().any(|x| !x.is_finite()) {
                    return invalid("cutoffs must be finite and nonempty");
                }
            }
            SelectionMode::TopK => {
                if self.k.is_none() {
                    return invalid("top_k selection needs `k`");
                }
                if self.cutoff.is_some() {
                    return invalid("`cutoff` is only used with cutoff selection");
                }
                if self.seed.is_none() {
                    return invalid("top_k selection can randomize and needs `seed`");
                }
            }
        }
        if self.group_column.is_some() && self.cluster.is_some() {
            return invalid("give either `group_column` or `cluster`, not both");
        }
        if self.cluster.is_some_and(|c| c.k == 0) {
            return invalid("cluster.k must be positive");
        }
        if !(self.floor.is_finite() && self.floor >= 0.0) {
            return invalid("floor must be a finite nonnegative number");
        }
        if let Some(policy) = self.policy()? {
            policy.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// Interval policy for the constructing methods; `None` for `as_given`.
    pub fn policy(&self) -> Result<Option<IntervalPolicy<f64>>, ConfigError> {
        if self.method == AS_GIVEN {
            if !self.params.is_empty() {
                return invalid("as_given takes no params");
            }
            return Ok(None);
        }
        let mut object = self.params.clone();
        for key in ["method", "floor"] {
            if object.contains_key(key) {
                return invalid(format!("`{key}` belongs at the top level, not in params"));
            }
        }
        object.insert("method".into(), Value::String(self.method.clone()));
        object.insert("floor".into(), Value::from(self.floor));
        serde_json::from_value(Value::Object(object))
            .map(Some)
            .map_err(|e| ConfigError::Invalid(format!("method {:?}: {e}", self.method)))
    }

    pub fn group_column(&self) -> &str {
        self.group_column.as_deref().unwrap_or("group")
    }

    /// The config as it is echoed into reports.
    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn set_cutoff(&mut self, cutoff: Cutoff) {
        self.selection = SelectionMode::Cutoff;
        self.cutoff = Some(cutoff);
        self.k = None;
    }

    pub fn set_top_k(&mut self, k: usize) {
        self.selection = SelectionMode::TopK;
        self.k = Some(k);
        self.cutoff = None;
    }
}
