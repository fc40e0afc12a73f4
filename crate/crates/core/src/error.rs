use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the crate. Validation failures (bad arguments,
/// budget caps) are distinct from numerical failures (non-convergence,
/// overflow) so callers can map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix entries must be finite (found NaN or infinity)")]
    NonFinite,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric: max |m_ij - m_ji| = {max_dev:e} exceeds tolerance {tol:e}")]
    Asymmetric { max_dev: f64, tol: f64 },

    #[error("eigensolver failed to converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("integer overflow during exact elimination")]
    IntegerOverflow,

    #[error("X is not an involution: max |X^2 - I| = {max_dev:e}")]
    NotInvolution { max_dev: f64 },

    #[error("X is not a permutation matrix (entries must be exactly 0/1 with a single 1 per row and column)")]
    NotPermutation,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("degenerate link pattern: (s, t) = (0, 0) mod N")]
    DegenerateLink,

    #[error("budget exceeded for {what}: requested {requested}, cap {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("missing distribution moments: need p_1..p_{needed}, got {given}")]
    MissingMoments { needed: usize, given: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// rejected input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonConvergence { .. } | Error::IntegerOverflow => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
