//! TOML run configuration. Flags override the file; the file overrides defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sli_core::datagen::GenConfig;
use sli_core::evaluation::distance::DistanceMode;
use sli_core::gateway::GatewayConfig;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub distractor_fraction: f64,
    pub distractor_min: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { distractor_fraction: 0.15, distractor_min: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub distance: DistanceMode,
    pub samples: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { distance: DistanceMode::Phone, samples: 20 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub inventory: Option<String>,
    pub datagen: GenConfig,
    pub gateway: GatewayConfig,
    pub bench: BenchConfig,
    pub eval: EvalConfig,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
    }
}
