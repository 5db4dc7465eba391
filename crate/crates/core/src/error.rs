use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown token {token:?} at offset {offset}")]
    UnknownToken { offset: usize, token: char },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("invalid variable list: {0}")]
    InvalidVars(String),

    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("{what} needs at most {limit} {unit}, got {actual}")]
    TooLarge {
        what: &'static str,
        unit: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

impl Error {
    pub(crate) fn at_line(line: usize, err: impl std::fmt::Display) -> Self {
        Error::Line {
            line,
            message: err.to_string(),
        }
    }
}
