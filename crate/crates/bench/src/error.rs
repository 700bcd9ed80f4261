use std::path::PathBuf;

use crate::scenario_file::LoadError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{origin}: {source}")]
    Load { origin: String, source: LoadError },
    #[error("unknown scenario `{0}` (not a builtin name or a readable file)")]
    UnknownScenario(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed result file: {0}")]
    RunFile(String),
    #[error("cannot render: {0}")]
    Render(String),
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io { path: path.into(), source }
    }

    /// 1 for configuration problems, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Load { .. } | BenchError::UnknownScenario(_) | BenchError::Config(_) => 1,
            _ => 2,
        }
    }
}
