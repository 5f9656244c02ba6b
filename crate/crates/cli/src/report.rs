//! Canonical JSON run reports.
//!
//! Keys are emitted in sorted order and floats in shortest round-trip form,
//! so identical runs produce byte-identical reports.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn to_canonical_value(v: &impl Serialize) -> CliResult<Value> {
    // serde_json's default map is ordered by key
    serde_json::to_value(v).map_err(|e| CliError::validation(format!("serializing report: {e}")))
}

pub fn canonical_string(v: &impl Serialize) -> CliResult<String> {
    Ok(to_canonical_value(v)?.to_string())
}

/// Hex SHA-256 over the canonical form of `{"command", "params"}`.
pub fn config_hash(command: &str, params: &Value) -> String {
    let canon = serde_json::json!({ "command": command, "params": params }).to_string();
    Sha256::digest(canon.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config_hash: String,
    pub params: Value,
    pub results: Value,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, params: Value, results: Value, artifacts: Vec<String>) -> Self {
        RunReport {
            command: command.to_string(),
            config_hash: config_hash(command, &params),
            params,
            results,
            artifacts,
        }
    }

    pub fn to_canonical(&self) -> CliResult<String> {
        canonical_string(self)
    }
}
