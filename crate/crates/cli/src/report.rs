use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunVerdict {
    Holds,
    Violated,
    InvalidInput,
}

impl RunVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            RunVerdict::Holds => 0,
            RunVerdict::Violated => 1,
            RunVerdict::InvalidInput => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunVerdict::Holds => "holds",
            RunVerdict::Violated => "violated",
            RunVerdict::InvalidInput => "invalid-input",
        }
    }

    pub fn from_holds(holds: bool) -> Self {
        if holds {
            RunVerdict::Holds
        } else {
            RunVerdict::Violated
        }
    }
}

/// Machine-readable result of one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub command: String,
    pub verdict: RunVerdict,
    pub witnesses: Value,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &str, verdict: RunVerdict, witnesses: Value) -> Self {
        RunReport {
            command: command.to_string(),
            verdict,
            witnesses,
            exit_code: verdict.exit_code(),
        }
    }
}

/// A report plus the plain-text lines shown without `--json`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn new(command: &str, verdict: RunVerdict, witnesses: Value, lines: Vec<String>) -> Self {
        Outcome {
            report: RunReport::new(command, verdict, witnesses),
            lines,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }
}
