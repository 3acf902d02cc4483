use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An enumeration would exceed its configured cap.
    #[error("budget exceeded for {what}: {requested} > limit {limit}")]
    Budget {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("operation not supported for {kind}: {what}")]
    Unsupported { kind: String, what: &'static str },

    /// The solver stopped without reaching the requested certified accuracy.
    #[error(
        "solver failed ({method}): enclosure [{lower}, {upper}] after {iterations} iterations"
    )]
    Solver {
        method: &'static str,
        lower: f64,
        upper: f64,
        iterations: usize,
    },

    #[error("partial sum {m} leaves the unit ball: norm {norm}")]
    BallConstraint { m: usize, norm: f64 },

    #[error("witness functional has dual norm {norm} > 1")]
    OutsideDualBall { norm: f64 },

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown {what}: {name}")]
    Unknown { what: &'static str, name: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Budget and solver failures are reported with a distinct exit status.
    pub fn is_resource_failure(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::Solver { .. })
    }
}
