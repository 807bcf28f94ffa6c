use std::time::{SystemTime, UNIX_EPOCH};

use finsler_core::verify::ResidualReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub generated_unix: u64,
}

/// Output of `verify`. Everything except `header` is a function of the config.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub header: Header,
    pub config_hash: String,
    pub instance: String,
    pub checks: Vec<ResidualReport>,
}

impl Report {
    pub fn new(config_text: &str, instance: &str, checks: Vec<ResidualReport>) -> Report {
        let generated_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            header: Header { generated_unix },
            config_hash: config_hash(config_text),
            instance: instance.to_string(),
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// The report with its header removed, for comparing two runs.
pub fn strip_header(json: &str) -> Result<serde_json::Value, serde_json::Error> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("header");
    }
    Ok(v)
}
