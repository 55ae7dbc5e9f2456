use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical identity that must hold by construction did not.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    /// A branch expected to be a product state is entangled.
    #[error("branch is not a product state (reduced Bloch norm {bloch_norm:.12})")]
    NotProduct { bloch_norm: f64 },

    /// A measurement outcome with (numerically) zero probability was requested.
    #[error("outcome has probability {probability:e}, below the collapse threshold")]
    ImpossibleOutcome { probability: f64 },

    /// The scenario configuration makes the contrasted arms coincide.
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
