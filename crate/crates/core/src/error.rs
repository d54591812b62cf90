use thiserror::Error;

/// Position-annotated error for the formula, task-file and policy-file parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: u32, col: u32, msg: impl Into<String>) -> Self {
        ParseError { line, col, msg: msg.into() }
    }

    /// Shift the error position, used when a formula is embedded in a larger file.
    pub fn offset(mut self, line: u32, col: u32) -> Self {
        if self.line == 1 {
            self.col += col;
        }
        self.line += line;
        self
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("signature mismatch in {0}")]
    SignatureMismatch(&'static str),
    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },
    #[error("{0} must be non-empty")]
    Empty(&'static str),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("postcondition contains both `{prop}` and its negation")]
    ConflictingPostcondition { prop: String },
    #[error("action `{action}` is not local for owner `{owner}`")]
    NotLocalForOwner { action: String, owner: String },
    #[error("action `{action}` is not applicable: no designated world survives the update")]
    NotApplicable { action: String },
    #[error("state is not global")]
    NotGlobal,
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("node budget exhausted after {0} states")]
    ResourceLimit(usize),
    #[error("execution stuck in non-goal state {0} with no assigned action")]
    Stuck(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
