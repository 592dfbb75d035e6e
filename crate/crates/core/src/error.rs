//! Crate-wide error type.

use core::fmt;

use crate::pmf::Var;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A variable name was not found in the pmf.
    UnknownVariable(Var),
    /// The same variable appears twice where distinct names are required.
    DuplicateVariable(Var),
    /// A variable subset argument was empty.
    EmptyVariableSet,
    /// Variable subsets that must be disjoint overlap.
    OverlappingVariableSets,
    /// A probability table is negative, does not sum to one, or has the
    /// wrong number of entries for its alphabet sizes.
    InvalidDistribution(&'static str),
    /// A channel row does not sum to one within tolerance.
    NotStochastic,
    /// A scalar argument is outside its documented domain.
    OutOfRange(&'static str),
    /// An input makes the requested quantity undefined (e.g. a zero
    /// correlation where a ratio of correlations is needed).
    DegenerateInput(&'static str),
    /// The assembled correlation matrix is not positive semidefinite.
    NotPositiveSemidefinite,
    /// A computed value violated an exact mathematical property by more
    /// than float round-off; this indicates a bug, not bad input.
    Inconsistency(&'static str),
    /// Rejection sampling exceeded its draw cap.
    SamplingFailed { attempts: u64 },
    /// A configuration value violates the documented invariants.
    InvalidConfig(&'static str),
    /// A grid argument has no cells or is not strictly increasing.
    InvalidGrid(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownVariable(v) => write!(f, "unknown variable {v}"),
            Error::DuplicateVariable(v) => write!(f, "duplicate variable {v}"),
            Error::EmptyVariableSet => write!(f, "variable subset is empty"),
            Error::OverlappingVariableSets => write!(f, "variable subsets overlap"),
            Error::InvalidDistribution(what) => write!(f, "invalid distribution: {what}"),
            Error::NotStochastic => write!(f, "channel rows must sum to 1 within 1e-12"),
            Error::OutOfRange(what) => write!(f, "argument out of range: {what}"),
            Error::DegenerateInput(what) => write!(f, "degenerate input: {what}"),
            Error::NotPositiveSemidefinite => {
                write!(f, "correlation matrix is not positive semidefinite")
            }
            Error::Inconsistency(what) => write!(f, "internal consistency violation: {what}"),
            Error::SamplingFailed { attempts } => {
                write!(f, "rejection sampling failed after {attempts} draws")
            }
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::InvalidGrid(what) => write!(f, "invalid grid: {what}"),
        }
    }
}

impl core::error::Error for Error {}
