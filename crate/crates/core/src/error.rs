// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("input {input} is outside the domain of the function")]
    UndefinedPoint { input: String },

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("promise cannot be satisfied: {0}")]
    Unsatisfiable(String),

    #[error("{what} too large: {size} exceeds cap {cap}")]
    TooLarge {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("parity shortcut does not match the function: {0}")]
    InvalidShortcut(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("game unsolved ({reason}); value bracketed in [{lower}, {upper}]")]
    Unsolved {
        reason: String,
        lower: f64,
        upper: f64,
    },

    #[error("ill-posed relation: {0}")]
    IllPosedRelation(String),

    #[error("circuit/instance mismatch: {0}")]
    LayoutMismatch(String),

    #[error("distribution support violation: {0}")]
    Support(String),

    #[error("qubit index {qubit} out of range for {qubits} qubits")]
    QubitRange { qubit: usize, qubits: usize },

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
