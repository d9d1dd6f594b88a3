use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label space: {0}")]
    InvalidLabelSpace(String),
    #[error("label {label} outside 1..={c}")]
    LabelOutOfRange { label: usize, c: usize },
    #[error("empty bag")]
    EmptyBag,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite feature value")]
    NonFinite,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("example {0} has no ground-truth label")]
    MissingTruth(usize),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
