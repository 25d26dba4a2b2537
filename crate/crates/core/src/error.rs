use thiserror::Error;

/// Errors raised by the algebraic and counting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient domains differ: {0}")]
    DomainMismatch(String),

    #[error("group element has det(g2)*det(g4) = {0}, expected 1")]
    DeterminantCondition(String),

    #[error("matrix is not invertible over the coefficient domain")]
    NotInvertible,

    #[error("the zero form has no roots to report")]
    ZeroForm,

    #[error("discriminant vanishes{0}")]
    ZeroDiscriminant(String),

    #[error("discriminant is indistinguishable from zero at relative tolerance {0:e}")]
    DegenerateReal(f64),

    #[error("expected real class {expected}, found {found}")]
    WrongRealClass { expected: u8, found: u8 },

    #[error("resolvent roots are not separated: {0}")]
    RepeatedRoots(String),

    #[error("parameter ordering violated: {0}")]
    ParameterOrder(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime {prime} is outside the supported range: {reason}")]
    UnsupportedPrime { prime: u64, reason: String },

    #[error("degenerate curve: 4a^3 + 27b^2 = 0 mod {0}")]
    DegenerateCurve(u64),

    #[error("pair is not in W_p for p = {0}")]
    NotInWp(u64),

    #[error("pair lies in W_p^(1) for p = {0}")]
    InWp1(u64),

    #[error("resolvent has no repeated linear factor mod {0}")]
    NoRepeatedFactor(u64),

    #[error("repeated factor of the resolvent is not rational over F_{0}")]
    RepeatedFactorNotRational(u64),

    #[error("no normalizing translate found mod {0}")]
    NormalizationFailed(u64),

    #[error("image has a non-integral coordinate {coordinate} = {value}")]
    NonIntegralImage { coordinate: String, value: String },

    #[error("unknown coordinate label {0:?}")]
    UnknownCoordinate(String),

    #[error("region is unbounded: {0}")]
    UnboundedRegion(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
