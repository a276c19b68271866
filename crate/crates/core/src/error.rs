use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Two objects that must share a grid were built on different grids.
    GridMismatch,
    /// A value array does not have one entry per grid node.
    LengthMismatch { expected: usize, found: usize },
    /// A sample or input value is NaN or infinite.
    NonFinite { what: &'static str, index: usize },
    /// The right-hand side violates the growth hypothesis.
    Hypothesis(alloc::string::String),
    /// An operation that needs a converged run was handed an unconverged one.
    NotConverged,
    /// The bound series never became geometric within the term budget.
    BoundSeries { terms: usize },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            expected,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain {
                what,
                value,
                expected,
            } => write!(f, "{what} = {value} is out of range (expected {expected})"),
            Error::GridMismatch => f.write_str("samples live on different grids"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} node values, found {found}")
            }
            Error::NonFinite { what, index } => {
                write!(f, "{what} has a non-finite value at node {index}")
            }
            Error::Hypothesis(msg) => write!(f, "growth hypothesis violated: {msg}"),
            Error::NotConverged => f.write_str("the Picard run did not converge"),
            Error::BoundSeries { terms } => {
                write!(f, "bound-series ratio stayed above 1/2 for {terms} terms")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
