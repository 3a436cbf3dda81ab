use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{context}: {source}")]
    Analysis {
        context: String,
        #[source]
        source: mfdfa_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: no column named {column:?}", path.display())]
    MissingColumn { path: PathBuf, column: String },
    #[error("{}: dates not strictly increasing at line {line}", path.display())]
    NonMonotoneDates { path: PathBuf, line: usize },
    #[error("{}: unrecognised date {value:?} at line {line}", path.display())]
    BadDate { path: PathBuf, line: usize, value: String },
    #[error("{}: column {column:?} holds no usable values", path.display())]
    EmptySeries { path: PathBuf, column: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn analysis(context: impl Into<String>, source: mfdfa_core::Error) -> Self {
        Error::Analysis { context: context.into(), source }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Analysis { source: mfdfa_core::Error::DegenerateSeries { .. }, .. })
    }

    /// Process exit code: 3 for degenerate series, 2 for every input,
    /// validation or IO problem.
    pub fn exit_code(&self) -> i32 {
        if self.is_degenerate() {
            3
        } else {
            2
        }
    }
}
