use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("field {name} has a negative value {value} at index {index}")]
    NegativeValue { name: String, index: usize, value: f64 },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("point lies outside the grid box")]
    OutsideGrid,
    #[error("degenerate weight: identically zero")]
    DegenerateWeight,
    #[error(
        "insufficient padding: support reaches the boundary band (band max {band_max:e}, field max {field_max:e})"
    )]
    InsufficientPadding { band_max: f64, field_max: f64 },
    #[error("size guard exceeded: {points} points > {limit}")]
    SizeGuard { points: usize, limit: usize },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("oracle gate failed: {0}")]
    OracleGate(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam { name, reason: reason.into() }
    }
}
