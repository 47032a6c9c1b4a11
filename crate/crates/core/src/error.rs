use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric/Hermitian (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("series did not converge after {terms} terms (last term norm {last:.3e})")]
    NoConvergence { terms: usize, last: f64 },
    #[error("matrix is singular (smallest singular value {0:.3e})")]
    Singular(f64),
    #[error("matrix is not orthogonal (residual {0:.3e})")]
    NotOrthogonal(f64),
    #[error("matrix has full rank; the nearest orthogonal matrix is unique")]
    FullRank,
    #[error("determinant must be positive, got {0:.3e}")]
    NonPositiveDeterminant(f64),
    #[error("matrix is not in U(p,q) (residual {0:.3e})")]
    NotInGroup(f64),
    #[error("matrix is not in the Lie algebra u(p,q) (residual {0:.3e})")]
    NotInAlgebra(f64),
    #[error("diagonal block is singular")]
    BlockSingular,
    #[error("matrix is not of the form [[0,B],[B*,0]] (residual {0:.3e})")]
    NotNPart(f64),
    #[error(
        "unitary factor has an eigenvalue within {0:.1e} of -1; principal logarithm is ambiguous"
    )]
    PhaseBoundary(f64),
    #[error("point is not on the model space: {0}")]
    InvalidPoint(String),
    #[error("vector is not a unit tangent/normal: {0}")]
    InvalidTangent(String),
    #[error("minimality still holds at the end of the bracket t = {0}; cut time lies beyond it")]
    BracketTooSmall(f64),
    #[error("ellipse axes must satisfy a > b > 0 (got a = {a}, b = {b})")]
    InvalidAxes { a: f64, b: f64 },
    #[error("point lies on the cut locus ({0} nearest points); no gradient exists")]
    OnCutLocus(usize),
    #[error("point lies on the submanifold (distance {0:.3e})")]
    OnSubmanifold(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
