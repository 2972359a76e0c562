use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("path segment {segment} from {from} to {to} comes within {distance:e} of a singular point")]
    StepUnderflow {
        segment: usize,
        from: String,
        to: String,
        distance: f64,
    },

    #[error("series did not reach tolerance within {0} terms")]
    NoConvergence(usize),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
