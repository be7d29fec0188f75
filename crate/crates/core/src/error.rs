use thiserror::Error;

/// Errors raised by the consensus, synthesis and engagement routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied arguments that violate an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),

    /// Input is well formed but falls outside what the method handles.
    #[error("not supported: {0}")]
    NotSupported(String),

    /// Requested consensus target lies outside the reachable open interval.
    #[error("infeasible target {target}: must lie strictly inside ({lower}, {upper})")]
    Infeasible { target: f64, lower: f64, upper: f64 },

    /// The consensus dynamics escape instead of converging.
    #[error("no consensus: {:?} at t = {} (spread {} from {})", .0.reason, .0.time, .0.final_spread, .0.initial_spread)]
    Diverged(Box<crate::engine::Divergence>),

    /// Internal invariant broken; indicates a bug rather than bad input.
    #[error("internal logic error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
