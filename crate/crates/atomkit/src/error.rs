use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("atom index {index} out of range (structure has {len} atoms)")]
    AtomIndex { index: usize, len: usize },
    #[error("index {index} out of range for dimension {dim}")]
    DimIndex { index: usize, dim: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("mismatched carriers: {0}")]
    CarrierMismatch(String),
    #[error("enumeration size {size} exceeds cap {cap} (override with ATOMKIT_CAP)")]
    CapExceeded { size: u128, cap: u128 },
    #[error("materialization window {window} too small: exception index {index} would be cut off")]
    WindowTooSmall { window: usize, index: usize },
    #[error("format error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Format { line: Option<usize>, msg: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format { line: None, msg: msg.into() }
    }

    pub fn format_at(line: usize, msg: impl Into<String>) -> Self {
        Error::Format { line: Some(line), msg: msg.into() }
    }
}
