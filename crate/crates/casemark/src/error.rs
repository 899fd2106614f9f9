use std::path::PathBuf;

use thiserror::Error;

/// Failure to read an input file, always naming the file.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} does not exist", .0.display())]
    Missing(PathBuf),
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}:{line}: {source}", path.display())]
    Invalid { path: PathBuf, line: usize, source: casemark_core::Error },
    #[error(transparent)]
    Corpus(casemark_core::Error),
}

pub type LoadResult<T> = Result<T, LoadError>;
