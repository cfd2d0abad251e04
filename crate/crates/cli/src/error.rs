use std::fmt;

use svinv_core::ErrorCategory;

pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

/// A failure with its exit code and a short category tag.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn validation(kind: &str, message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, kind: kind.into(), message: message.into() }
    }

    pub fn runtime(kind: &str, message: impl Into<String>) -> Self {
        Self { code: EXIT_RUNTIME, kind: kind.into(), message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.kind, self.message)
    }
}

impl From<svinv_core::Error> for CliError {
    fn from(e: svinv_core::Error) -> Self {
        let code = match e.category() {
            ErrorCategory::Validation => EXIT_VALIDATION,
            ErrorCategory::Runtime => EXIT_RUNTIME,
        };
        Self { code, kind: e.kind().into(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::runtime("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::runtime("json", e.to_string())
    }
}
