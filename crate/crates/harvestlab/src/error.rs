use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge (best {best}, error estimate {abs_error:.3e}, {evaluations} evaluations)")]
    Convergence {
        best: Complex64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("degenerate measurement: {0}")]
    Degenerate(String),

    #[error("regime {requested} is inconsistent with the scenario (classified as {classified})")]
    InconsistentRegime { requested: String, classified: String },

    #[error("invalid scenario: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("pair {pair}: {source}")]
    Pair {
        pair: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn in_pair(self, pair: &'static str) -> Error {
        Error::Pair {
            pair,
            source: Box::new(self),
        }
    }
}
