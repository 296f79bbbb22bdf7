use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("feature index {index} out of range for dimension {dim}")]
    FeatureOutOfRange { index: usize, dim: usize },
    #[error("feature index {0} appears more than once")]
    DuplicateFeature(usize),
    #[error("feature indices are not strictly increasing at index {0}")]
    UnsortedFeatures(usize),
    #[error("non-finite value for feature {0}")]
    NonFiniteFeature(usize),
    #[error("label id {label} out of range for {label_count} labels")]
    LabelOutOfRange { label: usize, label_count: usize },
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("dataset has no instances")]
    EmptyDataset,
    #[error("no documents to fit")]
    NoDocuments,
    #[error("split fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
    #[error("{0} instance(s) cannot be split into two nonempty parts")]
    TooSmallToSplit(usize),
    #[error("non-finite gradient in parameter block {0}")]
    NonFiniteGradient(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("grid range must have at least one step")]
    EmptyRange,
    #[error("{0}")]
    Incompatible(&'static str),
}
