use thiserror::Error;

/// Errors raised by the oscillator library.
///
/// Variants are grouped by how the CLI reports them: parameter and domain
/// violations are caller mistakes, the numerical variants signal that a
/// solver could not deliver a result at the requested accuracy.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("tangent pole: |C_kappa({arg})| = {cos:e} is below the pole floor (kappa = {kappa})")]
    Pole { kappa: f64, arg: f64, cos: f64 },

    #[error("coordinate domain violation: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("scattering regime: 2*kappa*H_xi = {value:e} <= 0, ladder and symmetry functions are not real")]
    ScatteringRegime { value: f64 },

    #[error("flat curvature has no chi parameter; use the Euclidean spectrum")]
    FlatCurvature,

    #[error("bound-state maxima are only finite on the hyperboloid (kappa = {kappa} >= 0)")]
    NotHyperbolic { kappa: f64 },

    #[error("quantum number mu = {mu} exceeds mu_max = {mu_max}")]
    MuOutOfRange { mu: u32, mu_max: i64 },

    #[error("quantum number nu = {nu} exceeds nu_max({mu}) = {nu_max}")]
    NuOutOfRange { mu: u32, nu: u32, nu_max: i64 },

    #[error("a commensurate ratio (m, n) is required: {0}")]
    MissingRatio(String),

    #[error("implicit midpoint solve did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("trajectory reached a coordinate wall at t = {t}: |C_kappa| = {cos:e}")]
    WallProximity { t: f64, cos: f64 },

    #[error("unknown conserved quantity '{0}'")]
    UnknownQuantity(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("function evaluation failed near the bracket point: {0}")]
    Evaluation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
