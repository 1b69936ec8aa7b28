use thiserror::Error;

use crate::nilgroup::Space;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {coords:?} is not a canonical representative (coordinates must lie in [0,1))")]
    NonCanonical { coords: Vec<f64> },

    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: Space, found: Space },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("system is not ergodic: {0}")]
    NotErgodic(String),

    #[error("parameter s = {s} is not certified: 1, alpha, beta, alpha*s must be linearly independent over Q ({reason})")]
    Uncertified { s: f64, reason: String },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("too few populated bins: {populated} with at least {min_count} points, need {required}")]
    Indeterminate {
        populated: usize,
        min_count: usize,
        required: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
