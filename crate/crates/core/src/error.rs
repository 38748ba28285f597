use alloc::string::String;

/// Errors raised by the solvers, classifiers and dataset transforms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The soft threshold zeroed every entry of the iterate.
    #[error(
        "over-shrinkage: threshold lambda*t = {threshold} zeroed the iterate at iteration {iteration}{}",
        component.map(|c| alloc::format!(" (component {c})")).unwrap_or_default()
    )]
    OverShrinkage {
        threshold: f64,
        iteration: usize,
        component: Option<usize>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Attaches the index of the component being extracted to an
    /// over-shrinkage error; other variants pass through.
    pub fn with_component(self, index: usize) -> Self {
        match self {
            Error::OverShrinkage {
                threshold,
                iteration,
                ..
            } => Error::OverShrinkage {
                threshold,
                iteration,
                component: Some(index),
            },
            other => other,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
