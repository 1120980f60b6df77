use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("invalid simplex size {0}: must be at least 1")]
    InvalidSize(usize),

    #[error("state ({x},{y}) lies outside the simplex of size {size}")]
    OutOfSimplex { x: usize, y: usize, size: usize },

    #[error("vanishing denominator (-{size})_{order} with nonzero numerator at term ({i},{j},{k},{l})")]
    VanishingDenominator {
        size: usize,
        order: usize,
        i: usize,
        j: usize,
        k: usize,
        l: usize,
    },

    #[error("polynomial value matrix is singular at {0}")]
    SingularPolyMatrix(String),

    #[error("range error: {0}")]
    Range(String),

    /// Row sums of a constructed kernel differ from one. Always a bug.
    #[error("kernel row {row} sums to {sum}, not 1")]
    StochasticityViolation { row: usize, sum: String },

    #[error("gauge anchors cannot be met: {0}")]
    GaugeUnsolvable(String),

    #[error("invalid chain state ({i1},{i2}) for {dice} dice")]
    InvalidState { i1: usize, i2: usize, dice: usize },

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI and mirrored by the C ABI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_)
            | Error::ParseRational(_)
            | Error::Malformed(_)
            | Error::InvalidSize(_)
            | Error::OutOfSimplex { .. }
            | Error::InvalidState { .. }
            | Error::Range(_) => 2,
            Error::DegenerateParams(_)
            | Error::SingularPolyMatrix(_)
            | Error::VanishingDenominator { .. }
            | Error::GaugeUnsolvable(_) => 3,
            _ => 1,
        }
    }
}
