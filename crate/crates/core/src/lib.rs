//! Exact twisted tensor products, twisted product resolutions, and the homology
//! dimensions they compute.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod complex;
pub mod homology;
pub mod kernel;
pub mod lin;
pub mod resolutions;
pub mod twist;
pub mod twistprod;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown generator: {0}")]
    UnknownGenerator(String),
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("zero element: {0}")]
    ZeroElement(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composite map is nonzero: {0}")]
    CompositionNonzero(String),
    #[error("twist does not restrict to a bijection on the truncation: {0}")]
    NonInvertibleTruncation(String),
    #[error("differential raises filtration degree: {0}")]
    DegreeRaising(String),
    #[error("label cutoff too small: {0}")]
    CutoffTooSmall(String),
    #[error("lift leaves the embedded subcomplex: {0}")]
    RestrictionFailure(String),
    #[error("not a chain map: {0}")]
    ChainMapFailure(String),
    #[error("augmentation condition fails: {0}")]
    Augmentation(String),
    #[error("missing twist lift: {0}")]
    MissingLift(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
}

impl Error {
    /// Attaches a source position: parse errors are shifted to it (their own position is
    /// relative to a single expression), other kinds get a `line:column` prefix.
    pub fn located(self, line: usize, column: usize) -> Error {
        let at = |m: String| format!("at {line}:{column}: {m}");
        match self {
            Error::Parse { line: l, column: c, message } => {
                Error::Parse { line: line + l - 1, column: if l == 1 { column + c - 1 } else { c }, message }
            }
            Error::Validation(m) => Error::Validation(at(m)),
            Error::UnknownGenerator(m) => Error::UnknownGenerator(at(m)),
            Error::SpecMismatch(m) => Error::SpecMismatch(at(m)),
            Error::ZeroElement(m) => Error::ZeroElement(at(m)),
            Error::DimensionMismatch(m) => Error::DimensionMismatch(at(m)),
            Error::CompositionNonzero(m) => Error::CompositionNonzero(at(m)),
            Error::NonInvertibleTruncation(m) => Error::NonInvertibleTruncation(at(m)),
            Error::DegreeRaising(m) => Error::DegreeRaising(at(m)),
            Error::CutoffTooSmall(m) => Error::CutoffTooSmall(at(m)),
            Error::RestrictionFailure(m) => Error::RestrictionFailure(at(m)),
            Error::ChainMapFailure(m) => Error::ChainMapFailure(at(m)),
            Error::Augmentation(m) => Error::Augmentation(at(m)),
            Error::MissingLift(m) => Error::MissingLift(at(m)),
            Error::OutOfScope(m) => Error::OutOfScope(at(m)),
        }
    }
}
