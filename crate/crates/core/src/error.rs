use thiserror::Error;

/// Errors raised by the geometric and toric routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension {0} exceeds the supported limit of {max}", max = crate::cone::MAX_AMBIENT_DIM)]
    DimensionTooLarge(usize),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown cone id {0}")]
    UnknownCone(usize),

    #[error("vector is not in the dual cone (violation {violation:.3e})")]
    NotInDual { violation: f64 },

    #[error("cone is not a face of the given cone")]
    NotAFace,

    #[error("linear map is not a map of fans: image of cone {cone} lies in no target cone")]
    NotAFanMap { cone: usize },

    #[error("target lies outside the convex hull (violation {violation:.3e})")]
    OutsideHull { violation: f64 },

    #[error(
        "Newton solver did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error("weight for label `{label}` is not strictly positive")]
    NonPositiveWeight { label: String },

    #[error("point is not a member of the toric variety")]
    NotAMember,

    #[error("subdivision is not a triangulation")]
    NotATriangulation,

    #[error("label `{0}` is unknown or duplicated")]
    BadLabel(String),

    #[error("point clouds have different label sets ({0} vs {1} coordinates)")]
    LabelMismatch(usize, usize),

    #[error("sampling budget must be positive")]
    ZeroBudget,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
