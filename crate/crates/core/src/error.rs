use thiserror::Error;

/// Errors produced by the engines and analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("jump probability must lie strictly inside (0, 1), got {0}")]
    InvalidJumpProbability(f64),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    /// A tabulated trajectory was queried past its last entry, or a
    /// propagation step needed a tick the trajectory does not define.
    #[error("trajectory undefined at tick {tick}: {reason}")]
    TrajectoryUndefined { tick: u64, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Refusal to start a run whose work estimate exceeds the configured
    /// budget. The message carries a concrete suggestion.
    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid survival series: {0}")]
    InvalidSeries(String),

    /// A fit window was rejected (too few checkpoints, or a zero survival
    /// value makes the log-space fit undefined).
    #[error("fit window rejected: {0}")]
    FitWindow(String),

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    /// Whether this error reflects bad inputs (as opposed to a runtime or
    /// resource failure). CLI front-ends map the two classes to different
    /// exit codes.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::BudgetExceeded(_) | Error::TrajectoryUndefined { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
