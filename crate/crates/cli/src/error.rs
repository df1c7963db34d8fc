use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nilnike_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed transcript: {0}")]
    Transcript(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("invariant suite {suite} failed: {detail}")]
    Verify { suite: String, detail: String },
    #[error("derived keys disagree")]
    KeyMismatch,
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "Io",
            CliError::Transcript(_) => "Transcript",
            CliError::Config(_) => "Config",
            CliError::Verify { .. } => "InvariantFailed",
            CliError::KeyMismatch => "KeyMismatch",
            CliError::Csv(_) => "Csv",
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`, plus the suite name for
    /// failed invariants.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Verify { suite, .. } = self {
            body["suite"] = json!(suite);
        }
        json!({ "error": body })
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}
