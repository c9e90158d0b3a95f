use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precision must be positive")]
    InvalidPrecision,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {levels} levels (last agreement {estimate})")]
    QuadratureNonConvergence { levels: u32, estimate: String },

    #[error("integrand is not finite at t = {0}")]
    NonFiniteIntegrand(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("series syntax error at {pos}: {msg}")]
    SeriesSyntax { pos: usize, msg: String },

    #[error("acceleration failed: {0}")]
    Acceleration(String),

    #[error("closed form syntax error at {pos}: {msg}")]
    ClosedFormSyntax { pos: usize, msg: String },

    #[error("monomial exponent out of bounds: {0}")]
    ExponentOutOfBounds(String),

    #[error("expression syntax error at {pos}: {msg}")]
    ExprSyntax { pos: usize, msg: String },

    #[error("malformed catalog: {0}")]
    Catalog(String),

    #[error("unknown identity id `{0}`")]
    UnknownId(String),

    #[error("missing or unverified external value `{0}`")]
    MissingExternal(String),

    #[error("need more digits: {0}")]
    InsufficientPrecision(String),

    #[error("invalid relation query: {0}")]
    InvalidQuery(String),
}

pub type Result<T> = std::result::Result<T, Error>;
