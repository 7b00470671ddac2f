use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed mesh file at line {line}: {message}")]
    MalformedMesh { line: usize, message: String },

    #[error("cell {cell} is invalid: {reason}")]
    InvalidCell { cell: usize, reason: String },

    #[error("cell {cell} is clockwise (signed area {signed_area:e})")]
    Orientation { cell: usize, signed_area: f64 },

    #[error("cell {cell} is not a simple polygon (edges {first} and {second} intersect)")]
    NonSimple {
        cell: usize,
        first: usize,
        second: usize,
    },

    #[error("mesh is not conforming: {0}")]
    NonConforming(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cell {cell}: boundary projector needs k < eta (k = {k}, eta = {eta})")]
    ConditionViolation { cell: usize, k: usize, eta: usize },

    #[error("cell {cell}: ill-conditioned {what} system (condition number {condition:e})")]
    Conditioning {
        cell: usize,
        what: &'static str,
        condition: f64,
    },

    #[error("cell {cell}: unsupported configuration: {message}")]
    Unsupported { cell: usize, message: String },

    #[error("cell {cell}: polygon triangulation failed")]
    Triangulation { cell: usize },

    #[error("matrix is not positive definite ({what}, pivot {pivot})")]
    NotPositiveDefinite { what: &'static str, pivot: usize },

    #[error("linear solve did not converge (relative residual {residual:e} after {iterations} iterations)")]
    LinearSolve { residual: f64, iterations: usize },

    #[error("nonlinear function is not finite at dof {dof} (u = {value})")]
    FunctionDomain { dof: usize, value: f64 },

    #[error("scalar reaction solve failed at dof {dof} (residual {residual:e})")]
    ScalarNewton { dof: usize, residual: f64 },

    #[error("local moment Newton failed on cell {cell} (residual {residual:e})")]
    LocalNewton { cell: usize, residual: f64 },

    #[error("coupled reaction iteration did not converge (increment {increment:e} after {iterations} iterations)")]
    CoupledIteration { increment: f64, iterations: usize },

    #[error("time step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable numeric code, shared with the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::MalformedMesh { .. } => 10,
            Error::InvalidCell { .. } => 11,
            Error::Orientation { .. } => 12,
            Error::NonSimple { .. } => 13,
            Error::NonConforming(_) => 14,
            Error::InvalidArgument(_) => 2,
            Error::ConditionViolation { .. } => 20,
            Error::Conditioning { .. } => 21,
            Error::Unsupported { .. } => 22,
            Error::Triangulation { .. } => 23,
            Error::NotPositiveDefinite { .. } => 30,
            Error::LinearSolve { .. } => 31,
            Error::FunctionDomain { .. } => 40,
            Error::ScalarNewton { .. } => 41,
            Error::LocalNewton { .. } => 42,
            Error::CoupledIteration { .. } => 43,
            Error::Step { source, .. } => source.code(),
            Error::Internal(_) => 99,
            Error::Config(_) | Error::Json(_) => 3,
            Error::Io(_) | Error::Csv(_) => 4,
        }
    }
}
