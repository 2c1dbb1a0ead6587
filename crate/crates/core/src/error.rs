use std::fmt;

/// Errors produced anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    DivisionByZero,
    /// The denominator of a rational function vanishes at the requested point.
    PoleAtSpecialization(String),
    /// A specialization value that the engine refuses (0, 1 or -1).
    BadSpecialization(String),
    AlgebraMismatch { left: String, right: String },
    CalculusMismatch { left: String, right: String },
    MissingHopfData(String),
    /// An operation needs a form degree that the calculus does not populate.
    DegreeOverflow { calculus: String, degree: usize },
    /// d on form symbols is not available (no exterior-derivative table).
    MissingMaurerCartan { calculus: String, symbol: String },
    /// A map extension contradicts a presented relation.
    Inconsistent { relation: String, detail: String },
    /// The linear system determining a map extension has no or no unique solution.
    ExtensionFailed { symbol: String, detail: String },
    /// A vector expected inside a subspace is not in it.
    NotInSpan(String),
    /// A matrix expected invertible is singular.
    Singular(String),
    NonFlat(String),
    NotExact(String),
    BidegreeOutOfRange { wanted: (usize, usize), total: usize },
    Parse(String),
    Unsupported(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::PoleAtSpecialization(s) => write!(f, "pole at specialization: {s}"),
            Error::BadSpecialization(s) => write!(f, "bad specialization value: {s}"),
            Error::AlgebraMismatch { left, right } => {
                write!(f, "algebra mismatch: {left} vs {right}")
            }
            Error::CalculusMismatch { left, right } => {
                write!(f, "calculus mismatch: {left} vs {right}")
            }
            Error::MissingHopfData(a) => write!(f, "no Hopf data on algebra {a}"),
            Error::DegreeOverflow { calculus, degree } => {
                write!(f, "calculus {calculus} does not populate form degree {degree}")
            }
            Error::MissingMaurerCartan { calculus, symbol } => {
                write!(f, "calculus {calculus} has no exterior derivative for symbol {symbol}")
            }
            Error::Inconsistent { relation, detail } => {
                write!(f, "relation {relation} violated: {detail}")
            }
            Error::ExtensionFailed { symbol, detail } => {
                write!(f, "cannot solve for the image of {symbol}: {detail}")
            }
            Error::NotInSpan(s) => write!(f, "vector not in expected span: {s}"),
            Error::Singular(s) => write!(f, "singular matrix: {s}"),
            Error::NonFlat(s) => write!(f, "connection is not flat: {s}"),
            Error::NotExact(s) => write!(f, "sequence is not exact: {s}"),
            Error::BidegreeOutOfRange { wanted, total } => {
                write!(f, "bidegree {wanted:?} out of range for total degree {total}")
            }
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::Unsupported(s) => write!(f, "unsupported: {s}"),
            Error::Io(s) => write!(f, "io error: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
