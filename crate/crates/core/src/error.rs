use thiserror::Error;

/// Errors raised across the library.
///
/// [`Error::is_validation`] separates malformed input from computations that
/// failed on well-formed input; the CLI maps these to exit codes 2 and 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not unital: residual {residual:e} exceeds tolerance {tol:e}")]
    NotUnital { residual: f64, tol: f64 },
    #[error("not an isometry: residual {residual:e} exceeds tolerance {tol:e}")]
    NotIsometric { residual: f64, tol: f64 },
    #[error("not primitive: {0}")]
    NotPrimitive(String),
    #[error("not stationary: residual {0:e}")]
    NotStationary(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("density operator not faithful: smallest eigenvalue {0:e}")]
    NotFaithful(f64),
    #[error("rank zero tensor")]
    RankZero,
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("not a cocycle")]
    NotCocycle,
    #[error("non-orientable")]
    NonOrientable,
    #[error("not a closed manifold: {0}")]
    NotClosedManifold(String),
    #[error("not exact: least-squares residual {0:e}")]
    NotExact(f64),
    #[error("patches too far apart: overlap {eta} below {eta_min} on edge {edge:?}")]
    PatchesTooFar { edge: (usize, usize), eta: f64, eta_min: f64 },
    #[error("ambiguous gauge on edge {0:?}: leading mixed-transfer eigenvalue not simple")]
    AmbiguousGauge((usize, usize)),
    #[error("no scalar part on triangle {0:?}")]
    NoScalarPart(Vec<usize>),
    #[error("triangle {triangle:?} deviates from scalar by {dev} (max {dev_max})")]
    NotScalar { triangle: Vec<usize>, dev: f64, dev_max: f64 },
    #[error("flux on branch cut at tetrahedron {0:?}; refine the triangulation")]
    BranchCut(Vec<usize>),
    #[error("not quantized: residual {0:e}")]
    NotQuantized(f64),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("malformed base presentation: {0}")]
    MalformedBase(String),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed or structurally invalid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::InvalidInput(_)
                | Error::OutOfRange(_)
                | Error::MalformedBase(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
