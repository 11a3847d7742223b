use thiserror::Error;

/// Errors raised by the exact and high-precision pipelines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision mismatch: {0} bits vs {1} bits")]
    PrecisionMismatch(u32, u32),
    #[error("precision must be at least 64 bits, got {0}")]
    PrecisionTooLow(u32),
    #[error("polynomials are over different variable lists")]
    VariableMismatch,
    #[error("too many variables ({0}); at most {1} are supported")]
    TooManyVariables(usize, usize),
    #[error("exponent overflow in monomial product")]
    ExponentOverflow,
    #[error("not divisible")]
    NotDivisible,
    #[error("missing value for variable `{0}`")]
    MissingVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected degree 2 in `{var}`, found {found}")]
    DegreeMismatch { var: String, found: u32 },
    #[error("singular point: map denominator vanishes at step {step}")]
    SingularPoint { step: usize },
    #[error("singular linear system")]
    SingularSystem,
    #[error("invariants undefined: 1 - alpha2*alpha3*x1^2 vanishes")]
    InvariantsUndefined,
    #[error("axially symmetric configuration: parameters for axis {axis} are undefined")]
    AxiallySymmetric { axis: usize },
    #[error("wedge needs two distinct entries, got `{0}` twice")]
    SameEntry(char),
    #[error("unsupported period {0}")]
    UnsupportedPeriod(u32),
    #[error("mu_n diverges for n = 2 (cos(pi) = -1)")]
    DivergentMu,
    #[error("no rational point found within height bound {0}")]
    NotFound(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
