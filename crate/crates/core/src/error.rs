use thiserror::Error;

/// Errors raised by the evaluation routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("working precision of {digits} digits is below the minimum of {min}")]
    PrecisionTooLow { digits: u32, min: u32 },

    #[error("gamma function pole at nonpositive integer {0}")]
    GammaPole(String),

    #[error("quadrature did not converge after {nodes} nodes (value {value}, error estimate {estimate:e})")]
    QuadratureNonConvergence {
        nodes: usize,
        value: String,
        estimate: f64,
    },

    #[error("series order {got} is too small, degree {needed} is required")]
    InsufficientOrder { needed: usize, got: usize },

    #[error("series has a zero constant term; factor out the leading power of t first")]
    ZeroConstantTerm,

    #[error("power t^{order} raised to {exponent} is not a monomial with integer exponent")]
    NonIntegralPower { order: usize, exponent: String },

    #[error("{0}")]
    Domain(String),

    #[error("sector violation: {0}")]
    Sector(String),

    #[error("pole of 1 + (t/nu)^2 within {distance:e} of the integration ray")]
    PoleProximity { distance: f64 },

    #[error("regime {0} unsupported: exponentially improved expansions need lambda >= 1")]
    RegimeUnsupported(&'static str),

    #[error("truncation index {index} out of range, must satisfy {constraint}")]
    OutOfRange { index: usize, constraint: String },

    #[error("terminant argument lies on the negative real axis of the principal sheet")]
    PinchedContour,
}

pub type Result<T> = std::result::Result<T, Error>;
