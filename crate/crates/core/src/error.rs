use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: neighbor id {id} out of range (vertex count {count})")]
    OutOfRange { line: usize, id: u64, count: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid gamma: {0}")]
    InvalidGamma(String),
    #[error("gamma {0} is below 1/2; only the diameter-2 bound for gamma >= 0.5 is supported")]
    GammaBelowHalf(String),
    #[error("{0} must be at least 1")]
    NonPositive(&'static str),
    #[error("unknown mode {0:?} (expected base, split or time)")]
    UnknownMode(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("spill file {path}: {source}")]
    Spill {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt spill file {path}: {msg}")]
    Corrupt { path: PathBuf, msg: String },
    #[error("worker panicked: {0}")]
    WorkerPanic(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle refuses {what} of size {size} (limit {limit})")]
    TooLarge { what: &'static str, size: usize, limit: usize },
}

#[derive(Debug, Error)]
pub enum ResultIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}
