use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no real turning points: {0}")]
    NoRealTurningPoints(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed to reach tolerance {tolerance:e} (estimate {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("roots collided during iteration (separation {separation:e})")]
    DegenerateRoots { separation: f64 },

    #[error("evaluation point too close to a turning point (|p0| = {modulus:e})")]
    TurningPointSingularity { modulus: f64 },

    #[error("contour passes within {distance:e} of a singularity at {location}")]
    ContourTooClose { distance: f64, location: String },

    #[error("log argument {value:e} fell below the floor at theta = {theta}")]
    SingularLog { value: f64, theta: f64 },

    #[error("theta = {theta} lies within {margin} of the grid edge +/-{half_width}")]
    EdgeProximity {
        theta: f64,
        margin: f64,
        half_width: f64,
    },

    #[error("found {found} roots, {wanted} requested")]
    InsufficientRange { found: usize, wanted: usize },

    #[error("could not bracket eigenvalue {index}: {reason}")]
    BracketFailure { index: usize, reason: String },

    #[error("step size collapsed to {step:e} at x = {x}")]
    Stiffness { step: f64, x: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
