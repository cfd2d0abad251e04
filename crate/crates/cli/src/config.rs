use std::path::Path;

use serde::{Deserialize, Serialize};
use svinv_core::fwi::FwiConfig;
use svinv_core::geomodel::GeoConfig;
use svinv_core::noise::NoiseConfig;
use svinv_core::wavesim::{default_geometry, AcquisitionGeometry, SimConfig};
use svinv_core::Category;

use crate::error::CliError;

pub const SEED_ENV: &str = "SVINV_SEED";
pub const ECHO_FILE: &str = "run_config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub min_layers: usize,
    pub max_layers: usize,
    pub per_subgroup: usize,
    pub categories: Vec<Category>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { min_layers: 4, max_layers: 8, per_subgroup: 1, categories: Category::ALL.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub test_per_subgroup: usize,
    pub train_sizes: Vec<usize>,
    pub nested: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { test_per_subgroup: 800, train_sizes: vec![50, 100, 200, 300, 400], nested: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExportConfig {
    /// Model column used for velocity-depth profiles.
    pub profile_column: usize,
}

impl Default for ExportConfig {
    fn default() -> Self {
        Self { profile_column: 50 }
    }
}

/// Everything a run depends on besides input and output paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub suite: SuiteConfig,
    pub geomodel: GeoConfig,
    pub sim: SimConfig,
    pub geometry: AcquisitionGeometry,
    pub noise: NoiseConfig,
    pub split: SplitConfig,
    pub fwi: FwiConfig,
    pub export: ExportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: None,
            suite: SuiteConfig::default(),
            geomodel: GeoConfig::default(),
            sim: SimConfig::default(),
            geometry: default_geometry(),
            noise: NoiseConfig::default(),
            split: SplitConfig::default(),
            fwi: FwiConfig::default(),
            export: ExportConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation("config", format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::validation("config", format!("{}: {e}", path.display())))
    }

    /// Flag, then config file, then `SVINV_SEED`, then 0.
    pub fn resolve_seed(&mut self, flag: Option<u64>) -> Result<u64, CliError> {
        let seed = match flag.or(self.seed) {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::validation("config", format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
                Err(_) => 0,
            },
        };
        self.seed = Some(seed);
        Ok(seed)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::runtime("config", e.to_string()))
    }

    /// Writes the effective configuration next to a run's outputs.
    pub fn echo(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_toml()?).map_err(|e| CliError::runtime("io", format!("{}: {e}", path.display())))
    }
}
