use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The declared particle number of an occupation state differs from the
    /// sum of its occupations.
    #[error("closure violated: declared total {declared}, occupations sum to {actual}")]
    ClosureViolation { declared: usize, actual: usize },

    #[error("assignment has {actual} levels but the chain has {expected} oscillators")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("no oscillator occupies level {level}; threshold undefined")]
    EmptyLevelGroup { level: usize },

    /// Bose occupation requested with `β(ε − μ) ≤ 0`.
    #[error(
        "invalid chemical potential μ = {mu}: β(ε − μ) = {exponent} must be positive for bosons"
    )]
    InvalidChemicalPotential { mu: f64, exponent: f64 },

    /// A translational mode of the ideal Bose gas has `ε_k ≤ μ`.
    #[error("ε_k − μ = {gap} ≤ 0 at k = {k}; the Bose gas is undefined")]
    BoseConditionViolated { k: i64, gap: f64 },

    #[error("enumeration of {requested} configurations exceeds the cap of {cap}")]
    EnumerationTooLarge { requested: f64, cap: u64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Fails unless `value` is finite and strictly positive.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
