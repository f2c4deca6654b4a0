use thiserror::Error;

use crate::expr::{ParseError, WebFileError};

/// Failures of the numeric pipeline.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// Denominator jet has zero constant term: the base point lies on a pole
    /// or on the singular locus. Callers resample.
    #[error("division by a non-unit jet")]
    DivisionByNonUnit,
    #[error("jet order exhausted in {stage}")]
    OrderExhausted { stage: &'static str },
    #[error("{what} is singular at the base point")]
    SingularAtPoint { what: &'static str },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("web is not calibrated (d = {d}, c(n, k0) = {c})")]
    NotCalibrated { d: usize, c: usize },
    #[error("unknown built-in web `{0}`")]
    UnknownCorpus(String),
    #[error("invalid built-in option: {0}")]
    CorpusOption(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    WebFile(#[from] WebFileError),
}
