use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed graph data: {0}")]
    Malformed(String),

    #[error("unsupported file version {0}, expected 1")]
    Version(u32),

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("face {0} out of range")]
    FaceOutOfRange(usize),

    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dual edge sequence is not a simple cycle: {0}")]
    NotSimpleCycle(String),

    /// The requested measurement would leave the finite truncation.
    #[error("window insufficient: {reason} (required radius {required_radius})")]
    WindowInsufficient {
        reason: String,
        required_radius: usize,
    },

    #[error("search guard exceeded after {explored} steps (limit {limit}): {context}")]
    GuardExceeded {
        explored: u64,
        limit: u64,
        context: String,
    },

    #[error("hypotheses not satisfied: {0}")]
    HypothesesFail(String),

    #[error("inconsistency: {0}")]
    Inconsistent(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Malformed(_) | Error::Version(_) => "malformed_input",
            Error::VertexOutOfRange(_) | Error::FaceOutOfRange(_) | Error::EdgeOutOfRange(_) => {
                "out_of_range"
            }
            Error::Disconnected { .. } => "disconnected",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotSimpleCycle(_) => "not_simple_cycle",
            Error::WindowInsufficient { .. } => "window_insufficient",
            Error::GuardExceeded { .. } => "guard_exceeded",
            Error::HypothesesFail(_) => "hypotheses_not_satisfied",
            Error::Inconsistent(_) => "inconsistent",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
