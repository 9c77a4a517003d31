use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] degplan::Error),

    #[error("missing required value `{0}`")]
    Missing(&'static str),

    #[error("invalid value for `{field}`: {detail}")]
    Invalid { field: &'static str, detail: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {detail}")]
    Io { path: String, detail: String },

    #[error("{path} line {line}: {detail}")]
    Data { path: String, line: u64, detail: String },
}

impl CliError {
    pub fn invalid(field: &'static str, detail: impl Into<String>) -> Self {
        CliError::Invalid {
            field,
            detail: detail.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        }
    }

    /// 3 for numerical failures, 2 for everything the user can fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric_failure() => 3,
            _ => 2,
        }
    }

    pub fn record(&self) -> Value {
        use degplan::Error as E;
        let (kind, field) = match self {
            CliError::Core(e) => (
                match e {
                    E::Domain { .. } => "domain",
                    E::InvalidInput { .. } => "invalid_input",
                    E::Instability { .. } => "instability",
                    E::NotBracketed { .. } => "not_bracketed",
                    E::NoConvergence { .. } => "no_convergence",
                    E::Infeasible(_) => "infeasible",
                    E::SingularInformation(_) => "singular_information",
                    E::ZeroIncrement { .. } => "zero_increment",
                    E::Dataset(_) => "dataset",
                },
                match e {
                    E::InvalidInput { field, .. } => Some(*field),
                    _ => None,
                },
            ),
            CliError::Missing(f) => ("missing", Some(*f)),
            CliError::Invalid { field, .. } => ("invalid_input", Some(*field)),
            CliError::Config(_) => ("config", None),
            CliError::Io { .. } => ("io", None),
            CliError::Data { .. } => ("dataset", None),
        };
        let mut rec = json!({
            "error": kind,
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let Some(f) = field {
            rec["field"] = json!(f);
        }
        if let CliError::Data { line, .. } = self {
            rec["line"] = json!(line);
        }
        rec
    }
}
