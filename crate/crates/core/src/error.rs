//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("polygon is self-intersecting")]
    SelfIntersecting,
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
}

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("degree {0} exceeds the supported cap {1}")]
    DegreeCap(usize, usize),
    #[error("moment value overflowed the working precision at (i, j) = ({0}, {1})")]
    Overflow(usize, usize),
    #[error("quadrature did not converge: {0}")]
    QuadratureDiverged(String),
    #[error("extended precision is not available for custom jordan samplers")]
    ExtendedPrecisionUnsupported,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("header mismatch: {0}")]
    Header(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum BergmanError {
    #[error("requested degree {requested} exceeds moment degree {available}")]
    DegreeTooHigh { requested: usize, available: usize },
    #[error("orthogonalization breakdown at degree {degree}: the Gram form is numerically semidefinite (norm ratio {ratio:.3e})")]
    Breakdown { degree: usize, ratio: f64 },
    #[error("eigensolver failed to converge after {0} iterations")]
    EigenNonConvergence(usize),
    #[error("basis degree {available} is below the requested degree {requested}")]
    BasisDegree { requested: usize, available: usize },
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("series diverges: |w conj(omega)| = {0} >= 1")]
    Divergent(f64),
    #[error("point {0} is not in any island")]
    PointOutsideIslands(String),
    #[error("point {0} is inside the region; the Green function is defined on the exterior")]
    PointInside(String),
    #[error("no closed form available: {0}")]
    Unsupported(String),
}

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error("recovered contour is self-intersecting even after decimation retries; decimate harder or refine the grid")]
    ContourNotSimple,
    #[error("no region recovered: {0}")]
    EmptyRecovery(String),
    #[error("lake reconstruction infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Bergman(#[from] BergmanError),
    #[error(transparent)]
    Moments(#[from] MomentError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Top-level library error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Moments(#[from] MomentError),
    #[error(transparent)]
    Bergman(#[from] BergmanError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
