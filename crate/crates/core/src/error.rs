use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Clone` so that errors raised deep inside a lazily evaluated oracle can be
/// carried through a machine's outcome and re-raised at the top.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed pair code: {0}")]
    Decode(String),

    #[error("fuel exhausted while evaluating {query}")]
    FuelExhausted { query: String },

    #[error("scheme unsound: both sides fire on {tuple}")]
    SchemeUnsound { tuple: String },

    #[error("scheme incomplete: neither side fires on {tuple}")]
    SchemeIncomplete { tuple: String },

    #[error("functor broken: {0}")]
    FunctorBroken(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(String),

    #[error("machine fault: {0}")]
    Fault(String),
}

impl Error {
    pub fn fuel(query: impl Into<String>) -> Self {
        Error::FuelExhausted {
            query: query.into(),
        }
    }

    /// True for errors that mean "ran out of budget" rather than "wrong".
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::FuelExhausted { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
