use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate algebra: a1 = {a1}, a2 = {a2} (a1*a2 must be nonzero)")]
    DegenerateAlgebra { a1: String, a2: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lambda_{n} vanishes for sigma = {sigma}")]
    SingularLambda { n: i64, sigma: String },

    #[error("A_n^2 denominator vanishes at n = {n} (sigma = {sigma})")]
    SingularDenominator { n: i64, sigma: String },

    #[error("invalid irrep spec: {0}")]
    InvalidSpec(String),

    #[error("Pochhammer pole: {0}")]
    PochhammerPole(String),

    #[error("recurrence breakdown at n = {n}: {detail}")]
    RecurrenceBreakdown { n: usize, detail: String },

    #[error("difference coefficient pole at x = {x}")]
    CoefficientPole { x: usize },

    #[error("truncation pattern mismatch: {0}")]
    PatternMismatch(String),

    #[error("degenerate intermediate spectrum: {0}")]
    DegenerateIntermediateSpectrum(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid Racah parameters: {0}")]
    InvalidRacahParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
