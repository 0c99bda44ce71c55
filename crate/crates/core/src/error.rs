use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("on the coupling-phase boundary (Omega = {omega}, mean splitting = {ebar}); level order undefined")]
    PhaseBoundary { omega: f64, ebar: f64 },

    #[error("non-positive transition frequency eps_minus = {0}")]
    NonPositiveTransitionFrequency(f64),

    #[error("Bose-Einstein occupation diverges at omega = {0} <= 0")]
    DivergentOccupation(f64),

    #[error("steady state is not unique: smallest singular values {smallest:e}, {second:e}")]
    DegenerateSteadyState { smallest: f64, second: f64 },

    #[error("positivity violated: minimum eigenvalue {min_eigenvalue:e}{}", match .time { Some(t) => format!(" at t = {t}"), None => String::new() })]
    PositivityViolation { min_eigenvalue: f64, time: Option<f64> },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("coherence phases outside {{0, pi}} (sin beta = {sin_beta:e}, sin eps = {sin_epsilon:e}); use the general bound")]
    PhaseDomain { sin_beta: f64, sin_epsilon: f64 },

    #[error("state is not of X form (largest off-X entry {max_off:e})")]
    NotXForm { max_off: f64 },

    #[error("spectrum error: eigenvalue {0:e} is too negative")]
    SpectrumError(f64),

    #[error("outside validity domain: {0}")]
    DomainError(String),

    #[error("no sign change of the fixed-point coefficient along the axis")]
    NoBracket,

    #[error("config schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("config semantic error: {0}")]
    Semantic(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used for per-point failure columns.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::PhaseBoundary { .. } => "PhaseBoundary",
            Error::NonPositiveTransitionFrequency(_) => "NonPositiveTransitionFrequency",
            Error::DivergentOccupation(_) => "DivergentOccupation",
            Error::DegenerateSteadyState { .. } => "DegenerateSteadyState",
            Error::PositivityViolation { .. } => "PositivityViolation",
            Error::InvalidState(_) => "InvalidState",
            Error::PhaseDomain { .. } => "PhaseDomain",
            Error::NotXForm { .. } => "NotXForm",
            Error::SpectrumError(_) => "SpectrumError",
            Error::DomainError(_) => "DomainError",
            Error::NoBracket => "NoBracket",
            Error::Schema { .. } => "SchemaError",
            Error::Semantic(_) => "SemanticError",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn require_finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {v}"),
        })
    }
}
