//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by warplin operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A warping path violates a boundary condition (wrong endpoint or a
    /// point outside the lattice). `index` is the offending point.
    #[error("boundary violation at point index {index}")]
    BoundaryViolation { index: usize },

    /// A warping path takes an illegal step. `index` is the point that
    /// cannot be reached from its predecessor.
    #[error("step violation at point index {index}")]
    StepViolation { index: usize },

    /// Path enumeration would exceed the configured cap.
    #[error("enumeration too large: {count} admissible paths exceed cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    /// A path constraint admits no warping path.
    #[error("infeasible constraint: no admissible warping path")]
    InfeasibleConstraint,

    /// Operand shapes do not fit together.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An input matrix has a shape the operation cannot handle.
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// A label lies outside the domain expected by the loss function.
    #[error("label outside loss domain: {0}")]
    LabelDomain(String),

    /// A segment index is out of range.
    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    /// An operation requires a non-empty dataset.
    #[error("empty dataset")]
    EmptyDataset,

    /// A training example carries a label outside 1..=K.
    #[error("label {label} out of range 1..={num_classes}")]
    LabelOutOfRange { label: usize, num_classes: usize },

    /// A data file could not be parsed. Line numbers are 1-based.
    #[error("parse error at line {line}: {detail}")]
    ParseError { line: usize, detail: String },

    /// A data file contains no examples.
    #[error("empty data file")]
    EmptyFile,

    /// Too few examples for the requested split.
    #[error("too few examples: {available} available, {required} required")]
    TooFewExamples { available: usize, required: usize },

    /// Paired evaluation tables disagree in shape.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A ratio metric hit a zero denominator.
    #[error("division domain error: {0}")]
    DivisionDomain(String),

    /// Model file I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A model file does not carry the expected format header, or its body
    /// violates the format.
    #[error("model format mismatch: {0}")]
    FormatVersionMismatch(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
