use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole of the Gamma function at z = {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("degenerate hypergeometric parameters: {0}")]
    Degenerate(String),

    #[error("{what} did not converge within {limit} iterations")]
    NonConvergence { what: &'static str, limit: usize },

    #[error("quadrature budget exhausted on [{lo:e}, {hi:e}] (panel error {err:e})")]
    Quadrature { lo: f64, hi: f64, err: f64 },

    #[error("found {found} intensity peaks in the analysis window, need at least {needed}")]
    InsufficientPeaks { found: usize, needed: usize },

    #[error("oracle norm drift {drift:e} exceeds {limit:e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error("demodulation window spans {cycles} optical cycles, not an integer")]
    WindowMisaligned { cycles: f64 },

    #[error("config field `{field}`: expected {expected}, got {got}")]
    Config {
        field: String,
        expected: String,
        got: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            expected: expected.into(),
            got: got.into(),
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidParameter(_) | Error::Json(_))
    }
}
