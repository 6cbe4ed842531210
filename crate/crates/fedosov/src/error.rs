use fedosov_core::ValidationReport;
use serde_json::{json, Value};
use thiserror::Error;

use crate::json;

/// Errors surfaced by chart parsing and the command line.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: syntax error at column {column}: {message}")]
    Expression {
        field: String,
        column: usize,
        message: String,
    },
    #[error("{field}: denominator vanishes at the base point")]
    ZeroDenominator { field: String },
    #[error("{0}")]
    Shape(String),
    #[error("chart fails validation")]
    Validation { report: ValidationReport },
    #[error(transparent)]
    Core(#[from] fedosov_core::Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        CliError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Json { .. } => "json",
            CliError::Expression { .. } => "syntax",
            CliError::ZeroDenominator { .. } => "zero_denominator",
            CliError::Shape(_) => "shape",
            CliError::Validation { .. } => "validation",
            CliError::Core(e) => match e {
                fedosov_core::Error::Condition { .. } => "condition",
                fedosov_core::Error::Integrability { .. } => "integrability",
                fedosov_core::Error::Singular(_) => "singular",
                fedosov_core::Error::Domain(_) => "domain",
                fedosov_core::Error::Order(_) => "order",
                _ => "core",
            },
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// Exit status: 1 when the input was well formed but failed a mathematical check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({"kind": self.kind(), "message": self.to_string()});
        let extra = match self {
            CliError::Json { line, column, .. } => json!({"line": line, "column": column}),
            CliError::Expression { field, column, .. } => json!({"field": field, "column": column}),
            CliError::ZeroDenominator { field } => json!({"field": field}),
            CliError::Validation { report } => json!({"report": json::report(report)}),
            CliError::Core(fedosov_core::Error::Condition { name, witness }) => {
                json!({"condition": name, "witness": witness})
            }
            CliError::Core(fedosov_core::Error::Integrability {
                indices,
                multidegree,
            }) => {
                json!({"indices": indices, "multidegree": multidegree})
            }
            CliError::Io { path, .. } => json!({"path": path}),
            _ => json!({}),
        };
        if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
            b.extend(e);
        }
        json!({ "error": body })
    }
}
