//! Crate-wide error type.

use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the documented domain of an operation.
    Domain(&'static str),
    /// The decomposition angle equation `2α sin θ̃ = θ̃ cos θ̃` has no root in
    /// `(0, π/2)` for the given `α`.
    NoRoot,
    /// Two grid-bound objects with different resolutions were combined.
    GridMismatch { left: usize, right: usize },
    /// The relaxed fixed-point iteration for the implicit stage did not
    /// converge within the iteration budget at the given step size.
    PicardNotConverged { iters: usize, dt: f64 },
    /// Repeated step halving after fixed-point failures pushed the step size
    /// below the configured floor.
    UnrecoverableStiffness { t: f64, dt: f64 },
    /// A bound formula was requested outside its hypothesis.
    HypothesisNotMet(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NoRoot => write!(
                f,
                "decomposition angle equation has no root in (0, \u{3c0}/2) for this \u{3b1}"
            ),
            Error::GridMismatch { left, right } => {
                write!(f, "grid mismatch: {left} vs {right} cells")
            }
            Error::PicardNotConverged { iters, dt } => {
                write!(
                    f,
                    "fixed-point iteration stalled after {iters} iterations at dt = {dt}"
                )
            }
            Error::UnrecoverableStiffness { t, dt } => {
                write!(f, "step size fell below the floor at t = {t} (dt = {dt})")
            }
            Error::HypothesisNotMet(msg) => write!(f, "hypothesis not met: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
