use std::fmt;

use serde_json::json;

/// Failure classes mapped onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
    pub scenario: Option<String>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Config, message: message.into(), scenario: None }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Numeric, message: message.into(), scenario: None }
    }

    pub fn in_scenario(mut self, name: &str) -> Self {
        self.scenario.get_or_insert_with(|| name.to_string());
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Config => 2,
            Kind::Numeric => 3,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": {
                "kind": match self.kind { Kind::Config => "config", Kind::Numeric => "numeric" },
                "message": self.message,
                "scenario": self.scenario,
                "exit_code": self.exit_code(),
            }
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scenario {
            Some(s) => write!(f, "{s}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cavityspin::Error> for CliError {
    fn from(e: cavityspin::Error) -> Self {
        use cavityspin::Error as E;
        let kind = match e {
            E::InvalidSpin(_)
            | E::InvalidFockCutoff(_)
            | E::InvalidProjection { .. }
            | E::NonUnitAxis(_)
            | E::InvalidParameter { .. }
            | E::DimensionOverflow(..)
            | E::CutoffTooSmall(_)
            | E::DuplicateDistance(_) => Kind::Config,
            _ => Kind::Numeric,
        };
        CliError { kind, message: e.to_string(), scenario: None }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
