use thiserror::Error;

/// Library-wide error type.
///
/// The CLI maps these onto exit codes: `Domain` and `Config` are usage
/// problems (exit 1), `Input` and `DegenerateSpacing` are data problems
/// (exit 2), `Numeric` is a numerical failure (exit 3).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain: {0}")]
    Domain(String),

    #[error("input: {0}")]
    Input(String),

    /// A requested elemental touches tied order statistics, so one of the
    /// spacing ratios would be 0 and its log would diverge.
    #[error("degenerate spacing at elemental (i={i}, j={j}): {what}")]
    DegenerateSpacing {
        i: usize,
        j: usize,
        what: &'static str,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("numeric: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
