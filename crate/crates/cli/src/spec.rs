use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use starfw::{ProblemSpec, SolverConfig, StrategyKind};

use crate::error::{io_error, CliError};

/// A problem plus the strategies and configuration to run it with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub strategies: Vec<StrategyKind>,
    #[serde(default)]
    pub config: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Problems crossed with strategies for `bench`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    #[serde(default)]
    pub problems: Vec<ProblemSpec>,
    #[serde(default)]
    pub strategies: Vec<StrategyKind>,
    #[serde(default)]
    pub config: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Reads either a full experiment spec or a bare problem spec.
pub fn read_problem(path: &Path) -> Result<ProblemSpec, CliError> {
    let value: serde_json::Value = read_json(path)?;
    let parsed = if value.get("problem").is_some() {
        serde_json::from_value::<ExperimentSpec>(value).map(|e| e.problem)
    } else {
        serde_json::from_value::<ProblemSpec>(value)
    };
    parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
