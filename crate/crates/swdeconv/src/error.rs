//! Error type shared by every module.

use std::fmt;

/// Failures surfaced by the deconvolution toolkit.
///
/// Input-shape and domain violations are reported eagerly by constructors;
/// numerical failures (singular filters, undecided iterations) come out of
/// the operations themselves.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two sequences that must have the same length do not.
    DimensionMismatch { expected: usize, got: usize },
    /// A value that must be finite is NaN or infinite.
    NonFinite { what: &'static str, index: usize },
    /// A noise PSD entry is not strictly positive (or not finite).
    InvalidPsd { bin: usize },
    /// The filter response is below tolerance at a bin that must be inverted.
    SingularFilter { bin: usize, magnitude: f64, tol: f64 },
    /// A parameter lies outside its documented domain.
    InvalidParameter { name: &'static str, reason: String },
    /// A spectrum claimed to describe a real signal is not conjugate
    /// symmetric: the reconstructed imaginary part is too large.
    NotConjugateSymmetric { residue: f64 },
    /// An iteration reached its cap without converging or diverging.
    NoDecision { iterations: usize },
    /// The input data carry no usable information for the requested statistic.
    DegenerateData { reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected length {expected}, got {got}")
            }
            Error::NonFinite { what, index } => {
                write!(f, "non-finite value in {what} at index {index}")
            }
            Error::InvalidPsd { bin } => {
                write!(f, "noise PSD must be strictly positive and finite (bin {bin})")
            }
            Error::SingularFilter { bin, magnitude, tol } => {
                write!(
                    f,
                    "filter is singular at bin {bin}: |H| = {magnitude:e} <= tolerance {tol:e}"
                )
            }
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter {name}: {reason}")
            }
            Error::NotConjugateSymmetric { residue } => {
                write!(
                    f,
                    "spectrum is not conjugate symmetric: imaginary residue {residue:e} exceeds 1e-6"
                )
            }
            Error::NoDecision { iterations } => {
                write!(f, "iteration undecided after {iterations} steps")
            }
            Error::DegenerateData { reason } => write!(f, "degenerate data: {reason}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
