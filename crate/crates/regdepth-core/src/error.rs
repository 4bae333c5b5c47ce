use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Coefficient length does not match the dataset's column count.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Operation requires a specific shape (intercept column, fixed p).
    #[error("wrong shape: {0}")]
    WrongShape(String),

    /// Empty input where at least one element is required.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// mad(y) = 0: the response is degenerate and scaled unfitness is undefined.
    #[error("zero scale: mad of the response is 0, scaled unfitness is undefined")]
    ZeroScale,

    /// mad of the projected carriers is 0 for this direction.
    #[error("zero projection scale: mad of projected carriers is 0 for this direction")]
    ZeroProjectionScale,

    /// Every projection |x_i'v| fell below the exclusion threshold.
    #[error("degenerate direction: every projection is below the exclusion threshold")]
    DegenerateDirection,

    /// No direction in the plan produced a usable ratio sample.
    #[error("all sampled directions are degenerate for this dataset")]
    AllDirectionsDegenerate,

    /// Carrier matrix does not have full column rank.
    #[error("rank deficient carrier matrix")]
    RankDeficient,

    /// A parameter violated its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// CSV ingestion failure (I/O, header, or number parsing).
    #[error("csv error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
