use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: missing required column {column:?}")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] advids_core::Error),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for usage and configuration errors, 2 for data errors, 3 for
    /// internal numeric failures.
    pub fn exit_code(&self) -> i32 {
        use advids_core::Error as E;
        match self {
            AppError::Usage(_) => 1,
            AppError::Io { .. }
            | AppError::MissingColumn { .. }
            | AppError::Csv { .. }
            | AppError::Json { .. } => 2,
            AppError::Core(e) => match e {
                E::Config(_) => 1,
                E::EmptyData(_) | E::UnknownLabel(_) | E::InvalidLabel(_) => 2,
                E::Shape { .. }
                | E::EmptyMatrix { .. }
                | E::DataLength { .. }
                | E::InvalidDimension(_)
                | E::Numeric(_) => 3,
            },
        }
    }
}
