use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HusError {
    #[error("degenerate map: |ad - bc| = {det_abs:e} is below the constant-map threshold")]
    DegenerateMap { det_abs: f64 },
    #[error("point coincides with the pole -d/c")]
    PoleAtPoint,
    #[error("operation is not defined at infinity")]
    UnsupportedAtInfinity,
    #[error("map is not hyperbolic with real trace")]
    NotHyperbolic,
    #[error("map is linear (c = 0)")]
    LinearMap,
    #[error("conjugation does not reduce to a dilation (coefficient error {residual:e})")]
    ConjugationMismatch { residual: f64 },
    #[error("point is sent to infinity")]
    MapsToInfinity,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("delta {delta} too large (must be below {limit})")]
    DeltaTooLarge { delta: f64, limit: f64 },
    #[error("image of the circle is a line")]
    ImageIsLine,
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HusError>;
