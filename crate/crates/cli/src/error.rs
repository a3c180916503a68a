use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    pub fn usage(msg: impl Display) -> Self {
        CliError::Usage(msg.to_string())
    }

    pub fn input(msg: impl Display) -> Self {
        CliError::Input(msg.to_string())
    }

    pub fn internal(msg: impl Display) -> Self {
        CliError::Internal(msg.to_string())
    }

    /// Unreadable or malformed input file.
    pub fn read(path: &Path, err: impl Display) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    /// Failure while writing an output file.
    pub fn write(path: &Path, err: impl Display) -> Self {
        CliError::Internal(format!("cannot write {}: {err}", path.display()))
    }
}

macro_rules! input_errors {
    ($($t:ty),* $(,)?) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_errors!(
    diachrony::corpus::CorpusError,
    diachrony::parser::ParserError,
    diachrony::resolve::ResolveError,
    diachrony::ingest::IngestError,
    diachrony::preprocess::PreprocessError,
    diachrony::embed::EmbedError,
    diachrony::align::AlignError,
    diachrony::detect::DetectError,
    diachrony::eval::EvalError,
);

pub type Result<T, E = CliError> = std::result::Result<T, E>;
