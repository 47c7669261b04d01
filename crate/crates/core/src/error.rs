use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown map family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("max-modulus sequence is not increasing at step {step} (M={prev} then {next}); raise the base radius")]
    NonMonotoneModulus { step: usize, prev: f64, next: f64 },
    #[error("classification field has no {0} cells")]
    EmptySide(&'static str),
    #[error("map `{0}` has no pole enumeration or inverse rule")]
    UnsupportedMap(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("insufficient radii: {0}")]
    InsufficientRadii(String),
    #[error("map `{0}` is not of polynomial type")]
    NotPolynomialType(String),
    #[error("cannot invert max modulus: {0}")]
    InversionFailure(String),
    #[error("point lies within {distance:e} of a non-smooth seam")]
    Seam { distance: f64 },
    #[error("every sample was rejected ({rejected} near poles or undefined)")]
    AllSamplesRejected { rejected: usize },
    #[error("contraction check failed: |f(z)| = {image} > |z|/2 at |z| = {radius}; shrink r0")]
    ContractionFailure { radius: f64, image: f64 },
    #[error("logarithm branch tracking failed at depth {depth}")]
    BranchTracking { depth: usize },
    #[error("inverse iteration diverged: {0}")]
    DomainRestriction(String),
    #[error("backward orbit materialization exceeded {0} points")]
    MaterializationBudget(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
