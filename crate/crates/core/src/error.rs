use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("p must be >= 0 and < 0.5, got {0}")]
    InvalidNoise(f64),

    #[error("bound expressions need 0 < p < 0.5, got p = {0}")]
    BoundNoise(f64),

    #[error("probability must be in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("{}", delta_message(*.0))]
    InvalidDelta(f64),

    #[error("divergence is infinite at p = {0}")]
    InfiniteDivergence(f64),

    #[error("posterior {0} is already absorbed")]
    AbsorbedPosterior(f64),

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cannot compare item {0} with itself")]
    SelfComparison(usize),

    #[error("operation needs a {expected} instance, session holds {found}")]
    WrongInstance {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("fixed-mode search needs a positive query budget")]
    ZeroBudget,

    #[error("K must be at least 1")]
    EmptyInstance,

    #[error("{0}")]
    Config(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}

fn delta_message(delta: f64) -> String {
    if delta > 0.0 {
        format!("delta must be < 0.49, got {delta}")
    } else {
        format!("delta must be > 0, got {delta}")
    }
}
