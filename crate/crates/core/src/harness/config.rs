//! TOML run configuration. Every section and field is optional.
//!
//! ```toml
//! spine = "strong"            # or a [spine] table with a full spine description
//! [characterize]
//! friction_f0 = 3.0
//! [preprocess]
//! decimation = 1
//! outlier_k = 3.5
//! [lock]
//! engage_tol = 0.002
//! [jump]
//! trials = 20
//! [jump.sim]
//! dt = 1e-4
//! [bus]
//! state_port = 7501
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CharacterizeOptions, HarnessError};
use crate::bus::BusConfig;
use crate::lock::ControllerParams;
use crate::sim::TrialConfig;
use crate::spine::SpineConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpineSource {
    Named(String),
    Custom(SpineConfig),
}

impl Default for SpineSource {
    fn default() -> Self {
        SpineSource::Named("strong".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessSection {
    pub decimation: usize,
    pub outlier_k: f64,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        Self { decimation: 1, outlier_k: 3.5 }
    }
}

pub type LockSection = ControllerParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JumpSection {
    pub trials: u32,
    pub parallel: bool,
    pub sim: TrialConfig,
}

impl Default for JumpSection {
    fn default() -> Self {
        Self { trials: 20, parallel: true, sim: TrialConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    pub spine: SpineSource,
    pub characterize: CharacterizeOptions,
    pub preprocess: PreprocessSection,
    pub lock: LockSection,
    pub jump: JumpSection,
    pub bus: BusConfig,
}

impl HarnessConfig {
    pub fn spine_config(&self) -> Result<SpineConfig, HarnessError> {
        let cfg = match &self.spine {
            SpineSource::Named(name) => resolve_spine(name)?,
            SpineSource::Custom(cfg) => cfg.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<HarnessConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

/// A spine by name (`weak`, `medium`, `strong`) or from a TOML file
/// describing a full spine.
pub fn resolve_spine(spec: &str) -> Result<SpineConfig, HarnessError> {
    if let Some(cfg) = SpineConfig::named(spec) {
        return Ok(cfg);
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let cfg: SpineConfig =
            toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        return Ok(cfg);
    }
    Err(HarnessError::Config(format!("unknown spine '{spec}' (weak|medium|strong or a TOML file)")))
}
