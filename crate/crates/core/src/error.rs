use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(String),

    #[error("symbol {0:?} is not in the frequency table")]
    OutOfVocabulary(String),

    #[error("symbol id {id} out of range for alphabet of size {size}")]
    InvalidSymbolId { id: u32, size: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },

    #[error("no sequence data found in FASTA input")]
    NoSequence,

    #[error("FASTA record {0:?} not found")]
    RecordNotFound(String),

    #[error("invalid base {byte:?} at line {line}, column {column} (byte offset {offset})")]
    InvalidBase {
        byte: char,
        line: usize,
        column: usize,
        offset: u64,
    },

    #[error("symbol {0:?} has no purine/pyrimidine class")]
    NotNucleotide(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate fluctuation: F({window}) = 0 inside the fit range")]
    DegenerateFluctuation { window: usize },

    #[error("target unreachable: target alpha {target:.4}, achievable alpha at input exponent {alpha0:.4} is {achieved:.4}")]
    TargetUnreachable {
        target: f64,
        alpha0: f64,
        achieved: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
