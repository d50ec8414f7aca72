use thiserror::Error;

/// Crate-wide error type.
///
/// Model-level failures (`SingularMatrix`, `NegativeDemand`, `Unsatisfiable`)
/// map to CLI exit code 1; everything the argument parser rejects exits 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:.3e} at column {column} below threshold {threshold:.3e}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("requested {requested} vertices but only {available} are available")]
    TooFewVertices { requested: usize, available: usize },
    #[error("negative demand: x[{index}] = {value:.6e}")]
    NegativeDemand { index: usize, value: f64 },
    #[error("tie matrix is asymmetric at ({i}, {j})")]
    AsymmetricTies { i: usize, j: usize },
    #[error("visit position {position} outside [1, {n}]")]
    InvalidPosition { position: usize, n: usize },
    #[error("period {k} exceeds trajectory length {len}")]
    IndexOutOfRange { k: usize, len: usize },
    #[error("per-user coefficients are not homogeneous (max spread {0:.3e})")]
    NotHomogeneous(f64),
    #[error("geometric series did not settle within {terms} terms")]
    SeriesDiverged { terms: usize },
    #[error("no instance satisfied the demand-boundedness condition after {0} attempts")]
    Unsatisfiable(usize),
    #[error("run {run}: {what}")]
    DominanceViolated { run: usize, what: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category used in structured CLI error records.
    pub fn category(&self) -> &'static str {
        match self {
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidProbability(_) => "invalid_probability",
            Error::Parse { .. } => "parse_error",
            Error::TooFewVertices { .. } => "too_few_vertices",
            Error::NegativeDemand { .. } => "negative_demand",
            Error::AsymmetricTies { .. } => "asymmetric_ties",
            Error::InvalidPosition { .. } => "invalid_position",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::NotHomogeneous(_) => "not_homogeneous",
            Error::SeriesDiverged { .. } => "series_diverged",
            Error::Unsatisfiable(_) => "unsatisfiable",
            Error::DominanceViolated { .. } => "dominance_violated",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Io(_) => "io_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
