//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QtError {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact division by zero. In exact mode this usually signals a
    /// parameter collision (a factor in a denominator product vanished).
    #[error("division by zero{}", if .0.is_empty() { String::new() } else { format!(": {}", .0) })]
    DivisionByZero(String),

    /// A denominator factor vanished for the given parameters.
    #[error("parameter degeneracy: {0}")]
    ParameterDegeneracy(String),

    /// Dimension / index mismatch (e.g. partition longer than the number of
    /// variables).
    #[error("index error: {0}")]
    Index(String),

    /// Requested operation exceeds the configured degree cap.
    #[error("degree cap exceeded: degree {degree} > cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    /// A truncation window was too small for the requested tail budget.
    #[error("truncation budget not met: requested {requested:e}, achieved {achieved:e}")]
    Truncation { requested: f64, achieved: f64 },

    /// Invalid configuration or parameter file.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, QtError>;
