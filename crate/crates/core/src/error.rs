use thiserror::Error;

pub type Result<T> = std::result::Result<T, EpError>;

#[derive(Debug, Error)]
pub enum EpError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("symbol `{name}` is not finite at nonzero mode {xi:?}")]
    NonFiniteSymbol { name: String, xi: [f64; 3] },

    #[error("degenerate symbol evaluation: {0}")]
    DegenerateSymbol(String),

    #[error("invalid norm specification: {0}")]
    InvalidNorm(String),

    #[error("grid of {modes} modes exceeds the direct-engine cost guard of {limit}")]
    GridTooLarge { modes: usize, limit: usize },

    #[error("blow-up: density became non-positive ({min_density:e}) at t = {time}")]
    BlowUp { time: f64, min_density: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("finite-difference instability: {0}")]
    FiniteDifference(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
