use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cardinality list is empty")]
    EmptyCardinalities,

    #[error("variable {index} has cardinality {cardinality}, need at least 2")]
    CardinalityTooSmall { index: usize, cardinality: usize },

    #[error("joint state space of {0} states is too large")]
    StateSpaceOverflow(u128),

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("parameter {index} = {value} lies outside [0, 1]")]
    ParamOutOfRange { index: usize, value: f64 },

    #[error("probabilities are invalid: {0}")]
    InvalidProbabilities(String),

    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("variable index {0} appears more than once")]
    DuplicateIndex(usize),

    #[error("variable sets overlap at index {0}")]
    OverlappingSets(usize),

    #[error("{0} must not be empty")]
    EmptySet(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("perturbation failed to converge: {0}")]
    FailsToConverge(String),

    #[error("negative information {value} beyond numerical floor in {quantity}")]
    InconsistentInformation { quantity: &'static str, value: f64 },

    #[error("enumeration of {budget} candidate maps exceeds the budget of {limit}")]
    EnumerationTooLarge { budget: u128, limit: u128 },

    #[error("sequence does not match distribution: {0}")]
    SequenceMismatch(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
