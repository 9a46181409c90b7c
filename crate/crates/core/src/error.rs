use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("constant coefficient is not positive semidefinite: smallest eigenvalue {min_eig:e}")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("leading coefficient is singular: smallest singular value {sigma_min:e}")]
    SingularLeadingCoefficient { sigma_min: f64 },

    #[error("eigensolver failed for pencil of dimension {dim}: {reason}")]
    EigenSolver { dim: usize, reason: String },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point lies in the spectrum (spectral function {sigma:e}); no nonzero witness exists")]
    InSpectrum { sigma: f64 },

    #[error("Gauss-Hermite assembly did not converge: entry change {change:e} at {nodes} nodes")]
    QuadratureNotConverged { change: f64, nodes: usize },

    #[error("adaptive quadrature failed: {0}")]
    Quadrature(String),

    #[error("no sign change of the secular function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("closed form and quadrature disagree at lambda = {lambda}: {closed} vs {quadrature}")]
    OracleDisagreement {
        lambda: f64,
        closed: f64,
        quadrature: f64,
    },

    #[error("truncation n = {n}: {source}")]
    AtTruncation {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at(n: usize, err: Error) -> Error {
        Error::AtTruncation {
            n,
            source: Box::new(err),
        }
    }

    /// True for errors caused by invalid user input rather than numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => true,
            Error::AtTruncation { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(err: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(err.to_string())
    }
}
