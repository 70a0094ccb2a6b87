//! Reproducible run descriptions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{run_protocol, ProtocolConfig, RunOutcome};

/// Everything needed to repeat a run bit for bit. The timestamp is
/// informational and does not affect the result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ProtocolConfig,
    pub tool_version: String,
    pub seed: u64,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(config: ProtocolConfig, timestamp: impl Into<String>) -> Self {
        Self {
            seed: config.seed,
            config,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// The config with the manifest seed applied.
    pub fn effective_config(&self) -> ProtocolConfig {
        let mut c = self.config.clone();
        c.seed = self.seed;
        c
    }

    /// Repeats the recorded run (trial 0, transcript recorded).
    pub fn rerun(&self) -> Result<RunOutcome> {
        let c = self.effective_config();
        c.validate()?;
        run_protocol(&c, 0, true)
    }
}
