use thiserror::Error;

/// Violation of a model precondition (bad parameters, mismatched vectors).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{what} must be {rule}, got {value}")]
    OutOfRange {
        what: &'static str,
        rule: &'static str,
        value: f64,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("generator {id}: dispatch {power} kW outside feasible range [{min}, {max}]")]
    InfeasibleLoading {
        id: String,
        power: f64,
        min: f64,
        max: f64,
    },
    #[error("fleet of {0} generators exceeds the supported maximum of {max}", max = crate::diesel::MAX_FLEET)]
    FleetTooLarge(usize),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn check_range(
    what: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    rule: &'static str,
) -> Result<(), DomainError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(DomainError::OutOfRange { what, rule, value })
    }
}
