use thiserror::Error;

/// Errors shared across the crate.
///
/// Numerical operations never return silently-wrong values: when an exact
/// comparison cannot be decided at the configured precision, or a set
/// operation would exceed the interval cap, the operation fails loudly.
#[derive(Debug, Error)]
pub enum EvlError {
    /// A comparison stayed inconclusive after deepening to `max_depth`,
    /// or a series was requested with no retained terms.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A preimage or survivor computation would produce more interval
    /// parts than the configured cap.
    #[error("interval cap exceeded: needed {needed} parts, cap is {cap}")]
    CapExceeded { needed: u64, cap: u64 },

    /// Requested threshold at or above the supremum of the observable.
    #[error("level out of range: {0}")]
    LevelOutOfRange(String),

    /// Level inversion has no solution for the requested (n, tau).
    #[error("no solution: {0}")]
    NoSolution(String),

    /// Observable undefined at the queried point (value +infinity).
    #[error("observable undefined at {0}")]
    Undefined(String),

    /// A Monte Carlo membership test stayed ambiguous after the guard
    /// extension policy was used up.
    #[error("guard digits exhausted")]
    GuardExhausted,

    /// A statistical estimate was requested from an empty sample.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Bad run configuration.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, EvlError>;
