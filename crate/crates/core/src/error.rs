use thiserror::Error;

pub type Result<T> = std::result::Result<T, TdoError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TdoError {
    #[error("t = {t} lies outside the model domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("sampling window is empty or degenerate: {0}")]
    EmptyWindow(String),

    #[error("radicand {radicand} is not positive at t = {t}")]
    NonRealSigma { t: f64, radicand: f64 },

    #[error("AB - C^2 = {lhs} but K/W0^2 = {rhs}")]
    ConstraintViolation { lhs: f64, rhs: f64 },

    #[error("sigma = {sigma} fell below the floor {floor} at t = {t}")]
    SingularityApproached { t: f64, sigma: f64, floor: f64 },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("unknown phase case `{0}`")]
    UnknownCase(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("{0}")]
    Units(String),

    #[error("minimum-uncertainty criterion violated: relative deviation {max_violation} > {tol}")]
    CriterionViolated { max_violation: f64, tol: f64 },

    #[error("{0}")]
    Parameter(String),

    #[error("t_hi = {t_hi} exceeds the estimated convergence radius {radius}")]
    ConvergenceWarning { t_hi: f64, radius: f64 },

    #[error("alpha = {alpha} is not positive at t = {t}")]
    NonPositiveAlpha { t: f64, alpha: f64 },

    #[error("tabulated model: {0}")]
    Table(String),

    #[error("io: {0}")]
    Io(String),
}

impl TdoError {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            TdoError::Domain { .. } | TdoError::EmptyWindow(_) => "DomainError",
            TdoError::NonRealSigma { .. } => "NonRealSigma",
            TdoError::ConstraintViolation { .. } => "ConstraintViolation",
            TdoError::SingularityApproached { .. } => "SingularityApproached",
            TdoError::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            TdoError::UnknownCase(_) => "UnknownCase",
            TdoError::UnknownModel(_) => "UnknownModel",
            TdoError::Units(_) => "UnitsError",
            TdoError::CriterionViolated { .. } => "CriterionViolated",
            TdoError::Parameter(_) => "ParameterError",
            TdoError::ConvergenceWarning { .. } => "ConvergenceWarning",
            TdoError::NonPositiveAlpha { .. } => "NonPositiveAlpha",
            TdoError::Table(_) => "TableError",
            TdoError::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for TdoError {
    fn from(e: std::io::Error) -> Self {
        TdoError::Io(e.to_string())
    }
}

impl From<csv::Error> for TdoError {
    fn from(e: csv::Error) -> Self {
        TdoError::Table(e.to_string())
    }
}
