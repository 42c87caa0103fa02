use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use ssbjt_core::Scenario;

/// Record of one CLI run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the fully resolved scenario, defaults included.
    pub scenario_hash: String,
    pub parameters: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    /// Unix seconds.
    pub timestamp: u64,
}

pub fn scenario_hash(scenario: &Scenario) -> String {
    let canonical = scenario.to_config().to_toml_string();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl RunManifest {
    pub fn new(command: &str, scenario: &Scenario, timestamp: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            scenario_hash: scenario_hash(scenario),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            timestamp,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
