use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero element has infinite order")]
    InfiniteOrder,
    #[error("element is zero")]
    ZeroElement,
    #[error("place mismatch: {0}")]
    PlaceMismatch(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("coefficient not p-integral at degree {degree} (p = {p})")]
    NonIntegral { p: u64, degree: usize },
    #[error("{0} is not a p-adic unit")]
    NonUnit(String),
    #[error("negative valuation: {0}")]
    NegativeValuation(String),
    #[error("Witt length {0} unsupported (at most 3)")]
    WittLength(usize),
    #[error("missing concrete layer at {0}")]
    MissingConcrete(String),
    #[error("not a Tate curve: v_p(j) = {0} >= 0")]
    NotTateCurve(i64),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("non-principal input: {0}")]
    NonPrincipal(String),
    #[error("precision overflow: {0}")]
    Precision(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
