use thiserror::Error;

/// Errors raised by the geometric and analytic routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0} lies outside the open unit disk")]
    OutOfDomain(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("integrand is not finite along the path: {0}")]
    NonFiniteIntegrand(String),
    #[error("boundary sample set is empty")]
    EmptyBoundary,
    #[error("map `{0}` has no registered inverse")]
    NoInverse(String),
    #[error("preimage of {0} is not inside the unit disk")]
    PreimageNotInDisk(String),
    #[error("map derivative vanishes at {0}")]
    ZeroDerivative(String),
    #[error("point {0} is not a member of the grid region")]
    NotInRegion(String),
    #[error("no grid path joins the endpoints at this refinement depth")]
    DisconnectedEndpoints,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("exponent alpha = {0} is outside (0, 1]")]
    BadAlpha(f64),
    #[error("tail integral did not converge under refinement: {0}")]
    IntegralDiverged(String),
    #[error("no level-set crossing of |f| = {0} on any ray")]
    NoCrossing(f64),
    #[error("level set |f| = {radius} lies beyond the representable ray range (hyperbolic distance >= {lower_bound})")]
    BeyondRange { radius: f64, lower_bound: f64 },
    #[error("holder estimate carries no exponent")]
    MissingAlpha,
    #[error("boundary distance of the base point is not computable")]
    DegenerateBoundary,
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("bad flag: {0}")]
    BadFlag(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
