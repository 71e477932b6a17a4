//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |A - A^dag| entry = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix is not unitary (max |U U^dag - I| entry = {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("trace is {trace:.15} instead of 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("{name} = {value} is out of range: {constraint}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("deviation target {target:.6e} unreachable (maximum {max:.6e})")]
    TargetUnreachable { target: f64, max: f64 },

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("functional value has imaginary residue {imaginary:.3e}")]
    NonRealValue { imaginary: f64 },

    #[error("strategy enumeration too large: {count} deterministic strategies (limit {limit})")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("malformed input: {0}")]
    Malformed(String),
}
