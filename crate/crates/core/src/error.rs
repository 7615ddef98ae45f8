use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("grid size {0} must be a power of two and at least 8")]
    InvalidGridSize(usize),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("function is not analytic: negative-mode ratio {defect:e} exceeds tolerance {tolerance:e}")]
    NotAnalytic { defect: f64, tolerance: f64 },
    #[error("input must be real-valued: max |imag| = {0:e}")]
    NotReal(f64),
    #[error("invalid exponent p = {0}")]
    InvalidExponent(f64),
    #[error("point {0} lies outside the admissible disk of radius {1}")]
    OutsideDisk(String, f64),
    #[error("negative modulus sample {value} at index {index}")]
    NegativeModulus { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Schur function vanishes at the origin")]
    SchurZeroAtOrigin,
    #[error("function vanishes (below the log floor) on the whole grid")]
    DegenerateFunction,
    #[error("inner factor deviates from unimodular by {deviation:e} (tolerance {tolerance:e})")]
    InnerNotUnimodular { deviation: f64, tolerance: f64 },
    #[error("norm ||f||_p = {0} differs from 1")]
    NotNormalized(f64),
    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),
    #[error("quadrature diverges: {0}")]
    Divergent(String),
    #[error("angular bin {bin} holds {count} samples; increase the path count")]
    SparseBin { bin: usize, count: usize },
    #[error("rank-deficient regression at step {step} ({rows} rows, {basis} basis functions)")]
    RankDeficient { step: usize, rows: usize, basis: usize },
    #[error("stopping levels exceed the limit {0}")]
    TooManyLevels(usize),
    #[error("E F = 0: the truncation family needs a non-vanishing mean")]
    ZeroMean,
    #[error("requested {0} mode data is unavailable")]
    ModeUnavailable(&'static str),
    #[error("contract violated at step {step}: error ratio {ratio}")]
    ContractViolation { step: usize, ratio: f64 },
    #[error("i/o: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, HardyError>;

impl From<std::io::Error> for HardyError {
    fn from(e: std::io::Error) -> Self {
        HardyError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for HardyError {
    fn from(e: serde_json::Error) -> Self {
        HardyError::Format(e.to_string())
    }
}

impl From<csv::Error> for HardyError {
    fn from(e: csv::Error) -> Self {
        HardyError::Format(e.to_string())
    }
}
