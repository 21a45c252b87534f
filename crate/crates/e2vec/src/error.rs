use std::io;
use std::path::PathBuf;

/// Errors surfaced by file formats and the command line.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input file not found: {}", .0.display())]
    MissingInput(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("malformed file {}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] e2vec_core::Error),
    #[error("{0}")]
    Stream(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            Error::MissingInput(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        use e2vec_core::Error as C;
        match self {
            Error::MissingInput(_) => 2,
            Error::Schema(_) | Error::Format { .. } => 3,
            Error::Dimension(_) | Error::Core(C::DimensionMismatch { .. }) => 4,
            Error::Config(_) | Error::Core(C::Config(_) | C::UnknownGrade { .. } | C::TooFewPoints { .. }) => 5,
            Error::Degenerate(_) | Error::Core(C::Degenerate(_) | C::EmptyCorpus | C::InvalidUnit(_)) => 6,
            Error::Io { .. } | Error::Stream(_) => 1,
        }
    }
}
