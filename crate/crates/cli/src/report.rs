use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One checked statement with its outcome and a machine-checkable witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub tag: String,
    pub statement: String,
    pub passed: bool,
    pub witness: Value,
}

impl Certificate {
    pub fn new(tag: &str, statement: &str, passed: bool, witness: Value) -> Self {
        Certificate { tag: tag.into(), statement: statement.into(), passed, witness }
    }
}

/// The JSON document emitted by every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub certificates: Vec<Certificate>,
    pub data: Value,
    pub timing_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    /// The certificates alone, serialized; identical across runs with the
    /// same inputs.
    pub fn verdicts(&self) -> String {
        serde_json::to_string(&self.certificates).expect("certificates serialize")
    }
}
