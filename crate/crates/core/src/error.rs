use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Exact arithmetic left the 128-bit numerator range.
    #[error("dyadic arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("group dimension {n} outside 1..={cap}")]
    InvalidDim { n: u32, cap: u32 },

    #[error("largest exponent {exponent} exceeds group dimension {n}")]
    ExponentOverflow { exponent: u32, n: u32 },

    #[error("density is not representable at this resolution: {0}")]
    Resolution(String),

    #[error("invalid density exponents: {0}")]
    InvalidDensity(String),

    #[error("level decomposition needs a nonzero base mass")]
    ZeroMass,

    #[error("no level set satisfies L_s >= (1/6)(4/3)^s; arithmetic is inconsistent")]
    NoQualifyingLevel,

    #[error("character set is linearly dependent over GF(2)")]
    DependentSet,

    #[error("residual f_V is identically zero; spectrum of the set lies in V")]
    ZeroResidual,

    #[error("search space of {needed} subsets exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("unknown {kind} '{name}' (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
