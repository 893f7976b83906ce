//! Machine-readable run reports.
//!
//! A report carries no timestamps or host details: rendering the same job
//! with the same seed must produce byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Report {
    pub status: &'static str,
    pub seed: u64,
    pub residuals: BTreeMap<String, f64>,
    pub artifacts: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Report {
    pub fn error(seed: u64, message: String) -> Report {
        Report {
            status: "error",
            seed,
            residuals: BTreeMap::new(),
            artifacts: Value::Null,
            message: Some(message),
        }
    }

    pub fn render(&self) -> String {
        let mut body = serde_json::to_string_pretty(self).expect("report fields are plain data");
        body.push('\n');
        body
    }
}

/// Stable exit contract: 0 pass, 1 fail, 2 usage or parse error.
pub fn exit_code(e: &multilin::Error) -> i32 {
    match e {
        multilin::Error::Usage(_) | multilin::Error::Shape(_) | multilin::Error::Domain(_) => 2,
        multilin::Error::Numeric(_) => 1,
    }
}
