use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use telegraph_core::RawParams;

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

pub const TOOL_VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"), env!("TELEGRAPH_GIT_SUFFIX"));

/// Record of one run. The timestamp lives here and nowhere else, so data
/// files stay byte-identical across reruns.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub params: RawParams,
    pub command: String,
    pub seed: Option<u64>,
    pub budgets: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub tool_version: &'static str,
    pub threads: Option<usize>,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(params: RawParams, command: String, seed: Option<u64>, threads: Option<usize>) -> Self {
        RunManifest {
            params,
            command,
            seed,
            budgets: BTreeMap::new(),
            outputs: Vec::new(),
            tool_version: TOOL_VERSION,
            threads,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn budget(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.budgets.insert(key.to_string(), value.into());
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(path.display().to_string(), e))
    }
}
