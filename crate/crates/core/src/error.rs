use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A size limit (qubit budget, variable cap, subset DP bound) was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    /// A caller broke a precondition: widths disagree, malformed tables, etc.
    #[error("contract violation: {0}")]
    Contract(String),

    /// No measurement outcome reached probability 1 - 1e-9. For the algorithms in
    /// this crate that is always a bug.
    #[error("exactness violation: best outcome on `{register}` has probability {best_probability}")]
    Exactness { register: String, best_probability: f64 },

    /// A wrapped subroutine did not return its work registers (or phase) to
    /// their starting values.
    #[error("uncomputation left garbage: overlap with the clean state is {overlap}")]
    Garbage { overlap: f64 },

    /// An oracle gate touched queries outside the declared non-adaptive plan.
    #[error("adaptivity violation at query {query_number}: {detail}")]
    Adaptivity { query_number: usize, detail: String },

    #[error("parse error at {source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
