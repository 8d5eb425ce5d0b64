//! Error type shared by every layer of the engine.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Division by an exact zero.
    DivisionByZero,
    /// Mixed coefficient-field tags; values are never coerced silently.
    FieldMismatch,
    /// Division in ℚ\[p\] whose result would leave the polynomial ring.
    InexactDivision,
    /// Rational-function evaluation at a pole of the denominator.
    PoleAtPoint,
    /// Even-parity substitution applied to an element odd in the parameter.
    OddParity,
    /// A series coefficient beyond the tracked validity window was read.
    WindowExceeded { needed: i64, valid: i64 },
    /// A local expansion could not reach the requested order.
    InsufficientOrder,
    /// The curve violates the regularity conditions (multiple zero of dx,
    /// or dy vanishing at a branchpoint).
    NotRegular(String),
    /// dx has a zero that is not expressible in the coefficient field and
    /// no branchpoint list was supplied.
    BranchpointNotInField { unfactored_degree: usize },
    /// Two branchpoints coincide (or their difference is not invertible).
    CoincidentBranchpoints,
    /// Operation requires a single branchpoint.
    MultiBranchpoint,
    /// Operation requires x''(a)/2 = 1; rescale the curve first.
    NotNormalized,
    /// An order-1 pole showed up where the representation forbids residues.
    ResiduePresent,
    /// Weight too large for the decay of the form at infinity.
    DivergentAtInfinity,
    /// Operation requires x = z² up to a constant.
    NonQuadraticX,
    /// One-cut constructor: the supplied (α, γ) do not satisfy u₀ = 0.
    U0NotZero,
    /// The linear system fixing the curve coefficients is singular.
    SingularSystem,
    /// An exact identity that holds by construction failed (engine bug).
    IdentityFailed(String),
    /// Loop-equation residual is not a polynomial of the expected degree.
    ResidualNotPolynomial(String),
    /// Transform not representable for this curve (e.g. a Möbius map with
    /// c ≠ 0 on a log-type curve).
    UnsupportedTransform(String),
    /// Unknown verification suite name.
    UnknownSuite(String),
    /// Malformed input document or literal.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::FieldMismatch => write!(f, "mixed coefficient-field tags"),
            Error::InexactDivision => write!(f, "inexact division in polynomial ring"),
            Error::PoleAtPoint => write!(f, "evaluation at a pole"),
            Error::OddParity => write!(f, "element is not even in the formal parameter"),
            Error::WindowExceeded { needed, valid } => write!(
                f,
                "series window exceeded: coefficient at order {needed} requested, trusted through {valid}"
            ),
            Error::InsufficientOrder => write!(f, "cannot reach requested expansion order"),
            Error::NotRegular(why) => write!(f, "curve is not regular: {why}"),
            Error::BranchpointNotInField { unfactored_degree } => write!(
                f,
                "dx has zeroes outside the coefficient field (unfactored degree {unfactored_degree}); supply branchpoints explicitly"
            ),
            Error::CoincidentBranchpoints => write!(f, "branchpoints coincide"),
            Error::MultiBranchpoint => write!(f, "operation requires a single branchpoint"),
            Error::NotNormalized => write!(f, "operation requires x''(a)/2 = 1; rescale first"),
            Error::ResiduePresent => write!(f, "order-1 pole term encountered"),
            Error::DivergentAtInfinity => write!(f, "weight too large for decay at infinity"),
            Error::NonQuadraticX => write!(f, "operation requires x = z^2 up to a constant"),
            Error::U0NotZero => write!(f, "supplied (alpha, gamma) do not satisfy u0 = 0"),
            Error::SingularSystem => write!(f, "coefficient system is singular"),
            Error::IdentityFailed(what) => write!(f, "exact identity failed: {what}"),
            Error::ResidualNotPolynomial(what) => write!(f, "loop-equation residual: {what}"),
            Error::UnsupportedTransform(what) => write!(f, "unsupported transform: {what}"),
            Error::UnknownSuite(name) => write!(f, "unknown suite: {name}"),
            Error::Parse(what) => write!(f, "parse error: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
