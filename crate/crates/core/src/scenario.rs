//! JSON scenario files.
//!
//! ```json
//! {
//!   "system": { "M": 15, "L1": 8, "L2": 1 },
//!   "sweep": { "axis": "snr_db", "grid": [0, 5, 10], "trials": 1000, "seed": 7 },
//!   "schemes": ["scheme1_optimal", "scheme2_optimal"]
//! }
//! ```
//!
//! Missing `system` fields take their defaults. Unknown keys are rejected.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::experiment::{ScenarioConfig, SchemeId, SweepAxis};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    system: SystemConfig,
    sweep: SweepSection,
    schemes: Vec<SchemeId>,
}

fn default_trials() -> usize {
    1000
}

fn default_snr_db() -> f64 {
    20.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    axis: SweepAxis,
    grid: Vec<f64>,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_snr_db")]
    snr_db: f64,
}

/// 1-based line of the first occurrence of `"key"` in the document.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

/// Parses and validates a scenario document. `path` is only used in
/// diagnostics.
pub fn parse_scenario(text: &str, path: &Path) -> Result<ScenarioConfig> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Scenario {
        path: path.to_path_buf(),
        line: Some(e.line()),
        message: e.to_string(),
    })?;
    let scenario = ScenarioConfig {
        base: file.system,
        axis: file.sweep.axis,
        grid: file.sweep.grid,
        trials: file.sweep.trials,
        seed: file.sweep.seed,
        schemes: file.schemes,
        snr_db: file.sweep.snr_db,
        record_timing: false,
    };
    scenario.validate().map_err(|e| {
        let line = match &e {
            Error::InvalidConfig { field, .. } => line_of_key(text, field),
            Error::InvalidParameter(msg) if msg.contains("grid") => line_of_key(text, "grid"),
            Error::InvalidParameter(msg) if msg.contains("trials") => line_of_key(text, "trials"),
            Error::InvalidParameter(msg) if msg.contains("schemes") => line_of_key(text, "schemes"),
            _ => None,
        };
        Error::Scenario {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        }
    })?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, path)
}
