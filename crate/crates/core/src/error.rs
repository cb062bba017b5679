use std::io;

use thiserror::Error;

/// Errors produced by the engine, the solvers and the artifact readers.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (acting at a terminal node, shape mismatch, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("illegal action {action} at {at}")]
    IllegalAction { action: String, at: String },

    #[error("invalid game config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A strategy source has no entry for an infoset the evaluator needs.
    #[error("strategy undefined at infoset {0}")]
    MissingInfoset(String),

    #[error("round {0} has no trained embedding")]
    UntrainedRound(usize),

    #[error("missing artifact {}: {hint}", path.display())]
    MissingArtifact { path: std::path::PathBuf, hint: String },

    #[error("bad checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
