use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("pole of zeta at s = 1")]
    Pole,
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("missed zero in ({lo}, {hi}]: expected {expected} zeros, found {found}")]
    MissedZero {
        lo: f64,
        hi: f64,
        expected: i64,
        found: i64,
    },
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("data error: {0}")]
    Data(String),
    #[error("proximity error: {0}")]
    Proximity(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("quadrature error: {0}")]
    Quadrature(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable short name, used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Parameter(_) => "parameter",
            Error::Precision(_) => "precision",
            Error::Pole => "pole",
            Error::Numeric(_) => "numeric",
            Error::Consistency(_) => "consistency",
            Error::Coverage(_) => "coverage",
            Error::MissedZero { .. } => "missed-zero",
            Error::Format { .. } => "format",
            Error::Data(_) => "data",
            Error::Proximity(_) => "proximity",
            Error::Resolution(_) => "resolution",
            Error::Quadrature(_) => "quadrature",
            Error::Size(_) => "size",
            Error::Fit(_) => "fit",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
