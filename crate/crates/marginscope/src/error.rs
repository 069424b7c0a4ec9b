//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::hullsvm::HullWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} at row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid label {value:?} in {path} at row {row}: labels must be +1 or -1")]
    InvalidLabel {
        path: PathBuf,
        row: usize,
        value: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside bound's domain: {0}")]
    Domain(String),

    #[error("unknown ensemble {0:?}: expected gaussian, rademacher, uniform, or explicit")]
    UnknownEnsemble(String),

    #[error("class {label:+} has no points")]
    EmptyClass { label: i8 },

    #[error(
        "classes are not separable: squared hull distance {delta_sq:.3e} \
         is at or below the separation floor {floor:.3e}"
    )]
    NotSeparable { delta_sq: f64, floor: f64 },

    #[error(
        "iteration limit reached after {iters} iterations: duality gap {gap:.3e} \
         is above the tolerance {tol:.3e}"
    )]
    IterationLimit {
        iters: usize,
        gap: f64,
        tol: f64,
        /// Best witness found so far.
        witness: Box<HullWitness>,
    },

    #[error(
        "support enumeration too large: C({n}, {s}) exceeds the cap of {cap} supports; \
         audit a smaller matrix or a lower sparsity order"
    )]
    EnumerationCap { n: usize, s: usize, cap: u64 },
}
