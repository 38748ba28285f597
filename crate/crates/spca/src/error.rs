use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error(transparent)]
    Core(#[from] spca_core::Error),

    #[error("{context}: {source}")]
    Experiment {
        context: String,
        #[source]
        source: spca_core::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// The underlying numerical error, if any.
    pub fn core(&self) -> Option<&spca_core::Error> {
        match self {
            Error::Core(e) | Error::Experiment { source: e, .. } => Some(e),
            _ => None,
        }
    }

    /// True for over-shrinkage and other numerical failures of a solve.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.core(),
            Some(spca_core::Error::OverShrinkage { .. } | spca_core::Error::Numerical(_))
        )
    }
}
