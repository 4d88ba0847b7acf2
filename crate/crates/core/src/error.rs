use alloc::string::String;
use core::fmt;

use crate::Real;

/// Failures raised by the solver stack.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A series expansion did not reach working precision within its cap.
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },
    InvalidParameter(String),
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Argument outside (-1, 1) or a pole of the requested function.
    DomainError(String),
    /// Wronskian of an interior transfer step vanished.
    SingularTransfer {
        node: usize,
    },
    /// The characteristic function left a sizeable imaginary part.
    ImaginaryResidue {
        lambda: Real,
        relative: Real,
    },
    /// Fewer sign changes than requested eigenvalues within the scan range.
    BracketFailure {
        found: usize,
        wanted: usize,
    },
    NormDegenerate {
        norm_sq: Real,
    },
    /// The potential is not finite at an abscissa where it must be evaluated.
    Evaluation {
        x: Real,
        detail: String,
    },
    Syntax {
        offset: usize,
        expected: String,
    },
    UnknownIdentifier {
        offset: usize,
        name: String,
    },
    NonFinite {
        x: Real,
        subexpression: String,
    },
}

impl Error {
    /// Short stable name, used by the command line on stderr.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DomainError(_) => "DomainError",
            Error::SingularTransfer { .. } => "SingularTransfer",
            Error::ImaginaryResidue { .. } => "ImaginaryResidue",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::NormDegenerate { .. } => "NormDegenerate",
            Error::Evaluation { .. } => "EvaluationError",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownIdentifier { .. } => "UnknownIdentifier",
            Error::NonFinite { .. } => "NonFinite",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} terms")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected} samples, found {found}")
            }
            Error::DomainError(msg) => write!(f, "domain error: {msg}"),
            Error::SingularTransfer { node } => {
                write!(f, "vanishing Wronskian at mesh node {node}")
            }
            Error::ImaginaryResidue { lambda, relative } => write!(
                f,
                "characteristic function at lambda = {lambda} has relative imaginary part {relative:e}"
            ),
            Error::BracketFailure { found, wanted } => write!(
                f,
                "found {found} sign changes of the characteristic function, wanted {wanted}"
            ),
            Error::NormDegenerate { norm_sq } => {
                write!(f, "eigenfunction norm degenerate (norm^2 = {norm_sq:e})")
            }
            Error::Evaluation { x, detail } => {
                write!(f, "potential not finite at x = {x}: {detail}")
            }
            Error::Syntax { offset, expected } => {
                write!(f, "syntax error at byte {offset}: expected {expected}")
            }
            Error::UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{name}` at byte {offset}")
            }
            Error::NonFinite { x, subexpression } => {
                write!(f, "`{subexpression}` is not finite at x = {x}")
            }
        }
    }
}

impl core::error::Error for Error {}
