use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid root: {0}")]
    InvalidRoot(String),

    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("expected {expected} multiplicities for {family}, got {got}")]
    MultiplicityCount {
        family: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("irrational data in exact mode: {0}")]
    Irrational(String),

    #[error("point is too close to the hyperplane of root {root}: normalized distance {distance:e}")]
    HyperplaneProximity { root: usize, distance: f64 },

    #[error("sampling failed after {attempts} attempts: {reason}")]
    Sampling { attempts: usize, reason: String },

    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    #[error("variable index {index} out of range for {nvars} variables")]
    VariableIndex { index: usize, nvars: usize },

    #[error("polynomial parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("time step underflow at t = {time}: dt fell below {dt_min:e}")]
    DtUnderflow { time: f64, dt_min: f64 },

    #[error("out of range: {0}")]
    Range(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
