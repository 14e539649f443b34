use thiserror::Error;

/// Errors surfaced by the simulation pipeline.
#[derive(Debug, Error)]
pub enum SimError {
    /// Invalid scenario parameters (bad counts, infeasible capacity, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Matrix/vector dimensions that should have matched did not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A channel vector with (numerically) zero norm where a direction is needed.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// Operation defined only for line-of-sight channels was fed multipath input.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Port index outside the candidate set.
    #[error("port {port} out of range (0..{count})")]
    PortOutOfRange { port: usize, count: usize },

    /// Effective group channel is rank deficient; zero forcing cannot separate the users.
    #[error("singular group: effective channel rank {rank} < {users} users")]
    SingularGroup { rank: usize, users: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
