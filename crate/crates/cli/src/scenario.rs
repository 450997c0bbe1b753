//! Scenario files.
//!
//! A scenario is a TOML (or `.json`) document with a `simulation` table holding
//! the run configuration and an optional `output` table. Unknown keys anywhere
//! are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use airmax::engine::SimulationConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Record `V(k)` in the outcome.
    Lyapunov,
    /// Run every trace checker and write `checks.json`.
    Invariants,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Artifact directory; `--out` takes precedence.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub output: OutputOptions,
}

/// A scenario that could not be read or does not match the schema.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ScenarioFile {
    pub fn parse(text: &str, json: bool) -> Result<Self, ConfigError> {
        let parsed: Self = if json {
            serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?
        };
        parsed.simulation.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(parsed)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|ext| ext == "json");
        Self::parse(&text, json).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    pub fn wants(&self, kind: CheckKind) -> bool {
        self.output.checks.contains(&kind)
    }
}
