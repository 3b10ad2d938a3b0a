use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid arc: start {start} must lie in [0, 1) and length {length} in (0, 1]")]
    InvalidArc { start: f64, length: f64 },

    #[error("duty cycle {rho} outside the admissible range for {users} users")]
    InvalidDutyCycle { rho: f64, users: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} pairs")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{what} = {value} is out of its domain")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("unsupported number of users {0}: this operation requires exactly 3")]
    UnsupportedUsers(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
