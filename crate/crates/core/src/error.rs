use crate::scalar::EigenError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("contour at distance {m} is unavailable: {reason}")]
    BadContour { m: usize, reason: String },
    #[error("lattice has no boundary sites")]
    NoBoundary,
    #[error("boundary condition does not match the lattice: {0}")]
    BoundaryMismatch(String),
    #[error("missing boundary angle for site {site}")]
    MissingAngle { site: usize },
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("lattice with {sites} sites exceeds the configured maximum of {max}")]
    TooLarge { sites: usize, max: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("|beta| * spectral radius = {exponent} exceeds the overflow guard {limit}")]
    GibbsOverflow { exponent: f64, limit: f64 },
    #[error("matrix is not symmetric (|a12 - a21| = {0:e})")]
    NotSymmetric(f64),
    #[error("degenerate contour point {position}{}: |det| = {det:e} is below the guard", site.map(|s| format!(" (site {s})")).unwrap_or_default())]
    DegeneratePoint { position: usize, site: Option<usize>, det: f64 },
    #[error("contour needs at least {min} points, got {got}")]
    ContourTooShort { got: usize, min: usize },
    #[error("contour point {position} sits at the origin")]
    PointAtOrigin { position: usize },
    #[error("curve is empty")]
    EmptyCurve,
    #[error("curve is not monotone at sample {0}")]
    NonMonotone(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code: 1 validation, 2 numerical failure, 3 calibration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Eigen(_)
            | Error::GibbsOverflow { .. }
            | Error::NotSymmetric(_)
            | Error::DegeneratePoint { .. }
            | Error::EmptyCurve
            | Error::NonMonotone(_)
            | Error::Numerical(_) => 2,
            Error::Calibration(_) => 3,
            _ => 1,
        }
    }
}
