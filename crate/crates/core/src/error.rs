use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Diagonal and near-diagonal kernels are measures; they have no pointwise values.
    #[error("kernel `{0}` is distributional and cannot be evaluated pointwise")]
    DistributionalKernel(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {evaluations} evaluations (estimate {estimate:e}, error {error:e})")]
    QuadratureNotConverged {
        evaluations: usize,
        estimate: f64,
        error: f64,
    },

    #[error("pole of the gamma function at z = {0}")]
    Pole(Complex64),

    #[error("negative value {value:e} at site {site} (t = {time})")]
    NegativeValue { site: i64, value: f64, time: f64 },

    #[error("lattice window too small: support reached site {site} (limit {limit})")]
    WindowTooSmall { site: i64, limit: i64 },

    #[error("no front crossing of level {level} found")]
    FrontNotFound { level: f64 },

    #[error("root search found no root ({seeds} seeds tried)")]
    NoRootFound { seeds: usize },

    #[error("series diverged at X = {x} (validity window ends at X = {x_max})")]
    SeriesDiverged { x: f64, x_max: f64 },

    #[error("blow-up at T = {time}: max u = {max_u:e} exceeds {limit:e}")]
    BlowUp { time: f64, max_u: f64, limit: f64 },

    #[error("negativity breach at T = {time}: u = {value:e} at X = {x}")]
    NegativityBreach { time: f64, x: f64, value: f64 },

    #[error("time step tau = {tau} exceeds the stability cap tau_max = {tau_max}")]
    StepTooLarge { tau: f64, tau_max: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNotConverged { .. }
                | Error::NegativeValue { .. }
                | Error::WindowTooSmall { .. }
                | Error::FrontNotFound { .. }
                | Error::NoRootFound { .. }
                | Error::SeriesDiverged { .. }
                | Error::BlowUp { .. }
                | Error::NegativityBreach { .. }
                | Error::Pole(_)
        )
    }

    /// Short machine-readable tag used in run manifests.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DistributionalKernel(_) => "DistributionalKernel",
            Error::Domain(_) => "DomainError",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::Pole(_) => "PoleError",
            Error::NegativeValue { .. } => "NegativeValue",
            Error::WindowTooSmall { .. } => "WindowTooSmall",
            Error::FrontNotFound { .. } => "FrontNotFound",
            Error::NoRootFound { .. } => "NoRootFound",
            Error::SeriesDiverged { .. } => "SeriesDiverged",
            Error::BlowUp { .. } => "BlowUp",
            Error::NegativityBreach { .. } => "NegativityBreach",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }
}
