//! The JSON report every command writes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "expansive";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub case_id: String,
    pub case_hash: String,
    /// Settings after merging flags, case options and defaults.
    pub options: Value,
    /// `Expansive`, `NotExpansive`, `Unknown`, or a command-specific outcome.
    pub status: String,
    pub result: Value,
    pub timings: Timings,
}

impl Report {
    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}
