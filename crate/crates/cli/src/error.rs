use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numeric failure in {check}: {source}")]
    Numeric {
        check: String,
        #[source]
        source: mitbag_core::Error,
    },
}

impl VerifyError {
    pub fn numeric(check: &str) -> impl FnOnce(mitbag_core::Error) -> Self + '_ {
        move |source| Self::Numeric {
            check: check.to_string(),
            source,
        }
    }

    /// 2 for configuration and output problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Numeric { .. } => 3,
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> serde_json::Value {
        let kind = match self {
            Self::Config(_) => "config",
            Self::Io { .. } => "io",
            Self::Numeric { .. } => "numeric",
        };
        json!({ "error": { "kind": kind, "exit_code": self.exit_code(), "message": self.to_string() } })
    }
}
