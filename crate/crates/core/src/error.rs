//! Error type shared across the crate.

use core::fmt;

/// Everything that can go wrong while building cascades or fitting readouts.
///
/// The variants carry enough context to report the failure without access to
/// the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// Signal length is not a power of two at least 2.
    NonDyadicLength { len: usize },
    /// A single transform or pairing step needs a positive even length.
    OddLength { len: usize },
    /// A sample or generated value is NaN or infinite.
    NonFiniteSample { index: usize },
    /// A scalar argument is NaN or infinite.
    NonFiniteValue { what: &'static str },
    /// Pyramid level has the wrong number of coefficients.
    MalformedPyramid {
        level: usize,
        expected: usize,
        actual: usize,
    },
    /// Absolute difference handed to pair recovery is negative.
    NegativeAbsDiff { value: f64 },
    /// Pairing rule reduces to offset 0, pairing every row with itself.
    DegenerateRule { sigma: f64, tau: i64, rows: usize },
    /// Requested cascade depth exceeds what the signal length supports.
    DepthTooLarge { depth: usize, max: usize },
    /// Rule list is neither a single broadcast rule nor one rule per transition.
    RuleCountMismatch { rules: usize, depth: usize },
    /// Two shapes that must agree do not.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// A collection that must be non-empty is empty.
    Empty { what: &'static str },
    /// Targets are constant, so the coefficient of determination is undefined.
    UndefinedVariance,
    /// Node position falls outside the signal domain.
    PositionOutOfRange { position: usize, length: usize },
    /// Node positions must be strictly increasing.
    NonMonotonicPositions { index: usize },
    /// Sweep parameter values must be strictly monotone.
    NonMonotonicThetas { index: usize },
    /// Generator parameter outside its valid range.
    InvalidParameter { name: &'static str, value: f64 },
    /// Every candidate rule in the grid is degenerate.
    NoFeasibleRule,
    /// Readout asked to pair a network with a signal it was not built from.
    SignalNetworkMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::NonDyadicLength { len } => {
                write!(f, "length {len} is not a power of two at least 2")
            }
            Error::OddLength { len } => {
                write!(f, "length {len} is not a positive even number")
            }
            Error::NonFiniteSample { index } => {
                write!(f, "non-finite value at index {index}")
            }
            Error::NonFiniteValue { what } => write!(f, "{what} is not finite"),
            Error::MalformedPyramid {
                level,
                expected,
                actual,
            } => write!(
                f,
                "pyramid level {level} has {actual} coefficients, expected {expected}"
            ),
            Error::NegativeAbsDiff { value } => {
                write!(f, "absolute difference {value} is negative")
            }
            Error::DegenerateRule { sigma, tau, rows } => write!(
                f,
                "rule (sigma={sigma}, tau={tau}) gives offset 0 on {rows} rows"
            ),
            Error::DepthTooLarge { depth, max } => {
                write!(f, "depth {depth} exceeds maximum {max} for this signal")
            }
            Error::RuleCountMismatch { rules, depth } => write!(
                f,
                "{rules} rules cannot drive {depth} transitions; need 1 or {depth}"
            ),
            Error::DimensionMismatch {
                what,
                expected,
                actual,
            } => write!(f, "{what}: expected {expected}, got {actual}"),
            Error::Empty { what } => write!(f, "{what} is empty"),
            Error::UndefinedVariance => {
                write!(f, "targets are constant; coefficient of determination undefined")
            }
            Error::PositionOutOfRange { position, length } => {
                write!(f, "position {position} outside domain 1..={length}")
            }
            Error::NonMonotonicPositions { index } => {
                write!(f, "positions not strictly increasing at index {index}")
            }
            Error::NonMonotonicThetas { index } => {
                write!(f, "parameter values not strictly monotone at index {index}")
            }
            Error::InvalidParameter { name, value } => {
                write!(f, "parameter {name}={value} outside valid range")
            }
            Error::NoFeasibleRule => write!(f, "every candidate rule is degenerate"),
            Error::SignalNetworkMismatch => {
                write!(f, "network was not built from the supplied signal")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
