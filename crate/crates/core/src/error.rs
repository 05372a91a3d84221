use thiserror::Error;

/// Errors raised by the simulator, tomography and fitting layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("reflectivity {0} outside [0, 1]")]
    Reflectivity(f64),

    #[error("unknown mode {0}")]
    UnknownMode(String),

    #[error("beamsplitter couples mode {0} to itself")]
    SameMode(String),

    #[error("gray side {0} is not one of the beamsplitter's modes")]
    GraySide(String),

    #[error("post-selection groups overlap on mode {0}")]
    OverlappingGroups(String),

    #[error("negative norm {0:e} exceeds round-off tolerance")]
    NegativeNorm(f64),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate tau index {0}")]
    DuplicateTau(usize),

    #[error("tau index {0} outside 1..=5")]
    TauIndex(usize),

    #[error("invalid label {0:?}")]
    InvalidLabel(String),

    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("circuit is not a dual-rail two-qubit circuit: {0}")]
    NotDualRail(String),

    #[error("post-selected probability {0:e} too small to normalize")]
    DegenerateNormalization(f64),

    #[error("tomography system is singular")]
    Singular,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("malformed measurement matrix: {0}")]
    Malformed(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NegativeNorm(_)
                | Error::DegenerateNormalization(_)
                | Error::Singular
                | Error::NotHermitian(_)
                | Error::NotPsd(_)
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
