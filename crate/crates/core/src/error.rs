use thiserror::Error;

/// Errors raised by the geometry, flow and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({u}, {v}) lies outside the chart domain")]
    OutOfDomain { u: f64, v: f64 },

    #[error("umbilic proximity at ({u}, {v}): |k1 - k2| = {gap:e}")]
    UmbilicProximity { u: f64, v: f64, gap: f64 },

    #[error("principal-direction singularity: |sin a cos a| = {0:e} below standoff")]
    PrincipalSingularity(f64),

    #[error("chart is singular at ({u}, {v}): {reason}")]
    ChartSingular { u: f64, v: f64, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("trajectory too sparse: {0}")]
    SparseTrajectory(String),

    #[error("degenerate ridge: |sigma| = {0:e} inside the degeneracy band")]
    DegenerateRidge(f64),

    #[error("surface is not a canal surface: {0}")]
    NotCanal(String),

    #[error("spheres are tangent or nested: L(s1, s2) = {0}")]
    TangentSpheres(f64),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("neighborhood leaves the chart domain: {0}")]
    NeighborhoodExit(String),

    #[error("iteration budget exhausted: {0}")]
    Budget(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
