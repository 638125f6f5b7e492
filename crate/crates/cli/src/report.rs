use serde::Serialize;
use serde_json::Value;

use crate::io::InputDigest;

/// Overall outcome; doubles as the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Negative,
    InputError,
    InternalError,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Negative => 1,
            Status::InputError => 2,
            Status::InternalError => 3,
        }
    }
}

/// Machine-readable record of one invocation. Everything except
/// `timing_ms` is a function of the inputs and flags.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub status: Status,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            tool: "sympconn",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: Vec::new(),
            status: Status::Pass,
            results: Value::Null,
            error: None,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}
