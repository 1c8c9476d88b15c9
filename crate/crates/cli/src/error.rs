//! Failures and their exit codes.

use std::fmt;
use std::path::Path;

/// Exit codes are part of the interface.
pub mod code {
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const APPLY: i32 = 3;
    pub const GATEWAY: i32 = 4;
    pub const GENERATION: i32 = 5;
    pub const SCHEMA: i32 = 6;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(code::IO, format!("{}: {e}", path.display()))
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(code::PARSE, message)
    }

    pub fn apply(message: impl Into<String>) -> Self {
        Self::new(code::APPLY, message)
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self::new(code::SCHEMA, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<sli_core::gateway::GatewayError> for CliError {
    fn from(e: sli_core::gateway::GatewayError) -> Self {
        Self::new(code::GATEWAY, e.to_string())
    }
}

impl From<sli_core::datagen::GenError> for CliError {
    fn from(e: sli_core::datagen::GenError) -> Self {
        use sli_core::datagen::GenError;
        match e {
            GenError::Gateway(g) => g.into(),
            other => Self::new(code::GENERATION, other.to_string()),
        }
    }
}
