use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("illegal update: {0}")]
    IllegalUpdate(String),
    #[error("mode violation: {0}")]
    ModeViolation(String),
    #[error("ring parameter mismatch")]
    ParamMismatch,
    #[error("element has zero constant coefficient and is not invertible")]
    NonUnit,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix has a nonzero constant coefficient at ({0}, {1})")]
    NotNilpotentConstant(usize, usize),
    #[error("pivot 1 + b_i is not a unit at row {0}")]
    NonUnitPivot(usize),
    #[error("product hook order violated: {0}")]
    HookOrderViolation(String),
    #[error("no verified witness for successor query ({0}, {1})")]
    NoWitnessFound(usize, usize),
    #[error("path stitching failed between {0} and {1}")]
    StitchFailure(usize, usize),
    #[error("terminals {0} and {1} are disconnected")]
    Disconnected(usize, usize),
    #[error("terminal state error: {0}")]
    TerminalStateError(String),
    #[error("parameter out of domain: {0}")]
    ParamDomain(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
