use thiserror::Error;

/// Broad failure category, used by the command-line front end to pick an
/// exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Input,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectral parameter k = {re}+{im}i must satisfy Im k >= 0")]
    NegativeImaginaryPart { re: f64, im: f64 },

    #[error("evaluation point |t| = {t} exceeds depth y = {y}")]
    OutsideLightCone { y: f64, t: f64 },

    #[error("function support exceeds the working grid (edge value {edge:e}, max {max:e})")]
    Truncation { edge: f64, max: f64 },

    #[error("scattering coefficient vanished at k = {k} (internal inconsistency)")]
    InconsistentScattering { k: f64 },

    #[error("root bracketing failed on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("near-degenerate Wronskian zero near kappa = {kappa} (|W| = {w:e}); bound states ill-conditioned")]
    IllConditioned { kappa: f64, w: f64 },

    #[error("Wronskian |W| = {w:e} too small: spectral parameter too close to the spectrum")]
    NearSpectrum { w: f64 },

    #[error(
        "contour height c/h = {height} is not above the discrete spectrum (max kappa {kappa})"
    )]
    ContourTooLow { height: f64, kappa: f64 },

    #[error("quadrature did not reach tolerance within the node budget of {budget} panels")]
    NodeBudget { budget: usize },

    #[error("non-convergent integration: {0}")]
    NonConvergent(String),

    #[error("target window {what} = [{lo}, {hi}] lies outside the data range [{min}, {max}]")]
    WindowOutsideData {
        what: &'static str,
        lo: f64,
        hi: f64,
        min: f64,
        max: f64,
    },

    #[error("h schedule needs at least 3 levels, got {0}")]
    TooFewLevels(usize),

    #[error("CFL condition violated: dt = {dt} > {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("initial data support reaches the {edge} edge within the simulated time")]
    SupportTouchesEdge { edge: &'static str },

    #[error("wave field has {0} rows at y >= 0; at least 5 are needed")]
    TooFewRows(usize),

    #[error("point ({x}, {y}, {t}) is outside the recorded field or its uncontaminated region")]
    OutOfRange { x: f64, y: f64, t: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) | Error::Parse(_) => ErrorKind::Input,
            Error::InconsistentScattering { .. }
            | Error::BracketFailure { .. }
            | Error::IllConditioned { .. }
            | Error::NearSpectrum { .. }
            | Error::NodeBudget { .. }
            | Error::NonConvergent(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
