use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A value failed validation; `field` names the offending input.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("underdetermined task: {points} points for {unknowns} window coefficients")]
    Underdetermined { points: usize, unknowns: usize },

    #[error("empty grid: a sup norm over zero points is undefined")]
    EmptyGrid,

    #[error("grids {a} and {b} are too close for the sampling density (distance {distance:.3e} < {threshold:.3e})")]
    NotSeparated {
        a: String,
        b: String,
        distance: f64,
        threshold: f64,
    },

    #[error("target cannot be evaluated at {point}: {reason}")]
    TargetNotEvaluable { point: String, reason: String },

    /// The joint approximation schedule reached the degree cap before both
    /// bounds were met. `best_errors` holds the errors of the last attempt.
    #[error("approximation failed up to degree {max_degree}: best errors {best_errors:?} against bounds {bounds:?}")]
    ApproximationFailure {
        max_degree: usize,
        best_errors: Vec<f64>,
        bounds: Vec<f64>,
    },

    /// The index sequence has a bounded ratio lambda_n / n over the scanned
    /// range, so no doubly universal series exists for it.
    #[error("refused: lambda_n / n stays bounded (sup {sup_ratio} at n = {attained_at} over n <= {horizon}); when limsup lambda_n / n < +infinity the doubly universal class is empty")]
    BoundedRatio {
        sup_ratio: f64,
        attained_at: u64,
        horizon: u64,
    },

    #[error("cannot extend the ratio-doubling subsequence past {found} indices within horizon {horizon}; try a larger horizon")]
    SubsequenceExhausted { found: usize, horizon: u64 },

    /// Every candidate index was tried without the window objective dropping
    /// below the threshold. The trace lists `(mu, lambda_mu, best objective)`.
    #[error("candidates exhausted without reaching window threshold {threshold:.3e}; trace {trace:?}")]
    CandidatesExhausted {
        threshold: f64,
        trace: Vec<(u64, u64, f64)>,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("linear program: {0}")]
    Lp(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
