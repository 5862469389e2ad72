use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("`{0}` is not a dyadic rational")]
    NotDyadic(String),
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("table level {level}: {reason}")]
    Invalid { level: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle level {0} outside the supported range 1..=24")]
    LevelOutOfRange(u32),
    #[error(transparent)]
    Number(#[from] NumberError),
}
