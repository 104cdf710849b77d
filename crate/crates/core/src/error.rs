use thiserror::Error;

use crate::matching::BRUTE_FORCE_MAX_ORDER;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph of order {order} does not fit into order {target}")]
    OrderOverflow { order: usize, target: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("brute-force matcher refuses order {0} (limit is {BRUTE_FORCE_MAX_ORDER})")]
    OracleSize(usize),
    #[error("exact matcher exceeded its budget of {0} node expansions")]
    BudgetExceeded(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph `{id}`: {msg}")]
    InvalidGraph { id: String, msg: String },
    #[error("dataset contains no graphs")]
    EmptyDataset,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
