use std::path::PathBuf;

use thiserror::Error;
use wrfss_cec2010::BenchError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("all {0} runs failed")]
    AllRunsFailed(usize),
}

impl HarnessError {
    /// Whether the error stems from user input rather than execution.
    pub fn is_usage(&self) -> bool {
        matches!(self, HarnessError::Config(_) | HarnessError::Bench(BenchError::UnknownId(_)))
    }
}
