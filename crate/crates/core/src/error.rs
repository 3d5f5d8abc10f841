use thiserror::Error;

/// Errors raised by the numerical and algebraic routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("composition undefined: |g(0)| = {0} is not below 1")]
    CompositionDomain(f64),

    #[error("constant term {0:e} is numerically zero; series is not invertible")]
    ZeroConstantTerm(f64),

    #[error("function does not vanish at the origin (|f(0)| = {0:e})")]
    NonvanishingAtZero(f64),

    #[error("degenerate linear fractional map: |ad - bc| = {0:e}")]
    DegenerateMap(f64),

    #[error("symbol is not a self-map of the unit disk: {0}")]
    NotSelfMap(String),

    #[error("the identity map has every point fixed")]
    IdentityMap,

    #[error("point {0} does not lie in the open unit disk")]
    NotInDisk(String),

    #[error("evaluation at a pole ({0})")]
    Pole(String),

    #[error("operation requires a nonconstant symbol")]
    ConstantSymbol,

    #[error("truncation degree {given} too small; need at least {required}")]
    DegreeTooSmall { given: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn fmt_complex(z: num_complex::Complex64) -> String {
    format!("({},{})", z.re, z.im)
}
