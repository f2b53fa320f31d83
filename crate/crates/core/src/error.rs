use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("path passes within {distance:.3e} of branch point {point}")]
    TooCloseToBranchPoint { point: String, distance: f64 },

    #[error("overlapping cuts: {0}")]
    OverlappingCuts(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("a-period matrix is singular")]
    SingularPeriodMatrix,

    #[error("period invariant violated: {0}")]
    InvariantViolation(String),

    #[error("Riemann constants disagree with the block formula (distance {0:.3e})")]
    RiemannConstantMismatch(f64),

    #[error("invalid route: {0}")]
    InvalidRoute(String),

    #[error("theta argument outside the declared bound (|c|_inf = {0:.3e})")]
    ThetaArgumentOutOfBounds(f64),

    #[error("theta function nearly vanishes (|theta| = {0:.3e}); data inadmissible or corrupted")]
    ThetaUnderflow(f64),

    #[error("phase tracking exceeded the refinement limit near parameter {0}")]
    RefinementLimit(f64),

    #[error("winding total {0} is not within 0.01 of an integer")]
    NonIntegerWinding(f64),

    #[error("divisor is not admissible: {0}")]
    Inadmissible(String),

    #[error("several symbol vectors match the admissibility pattern")]
    AmbiguousAdmissibility,

    #[error("interpolating polynomial is not real (residual {0:.3e})")]
    NonRealPolynomial(f64),

    #[error("interpolating polynomial changes sign on interval {0}")]
    SignNotConstant(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
