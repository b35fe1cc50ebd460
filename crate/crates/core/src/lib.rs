//! Numerical laboratory for a nonlocal Kuramoto lattice on `[0, 1]` with two
//! singularities: a power-law interaction weight `ψ(x, y) = |x − y|^{−β}` and
//! a singular alignment force `h(θ) = sin(θ)/|θ|ₒ^α`.
//!
//! The crate simulates the `N`-cell discretization
//!
//! ```text
//! dθᵢ/dt = νᵢ + (κ/N) Σ_{j≠i} Ψᵢⱼ · sin(θⱼ − θᵢ) / max{|θⱼ − θᵢ|ₒ, δ}^α
//! ```
//!
//! with an adaptive implicit-midpoint stepper, and evaluates the closed-form
//! synchronization bounds (finite-time envelope, critical coupling κ*,
//! practical-synchronization asymptote) that the dynamics must respect.
//!
//! Modules follow the pipeline:
//!
//! * [`kernelmath`] — scalar math of `h`, `ψ`, their regularizations, and
//!   analytic constants,
//! * [`lattice`] — grids, step-function fields, kernel matrices, norms,
//! * [`dynamics`] — the pairwise right-hand side and its diagnostics,
//! * [`integrator`] — implicit midpoint with Picard relaxation and the
//!   adaptive step controller,
//! * [`bounds`] — analytic envelopes/thresholds plus verdicts on traces,
//! * [`experiments`] — parameter sweeps, mesh-refinement convergence study,
//!   and the concentration (mollifier) limit.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm`.

#![cfg_attr(not(feature = "std"), no_std)]
// guards written as `!(x > 0.0)` reject NaN along with the out-of-range
// values; the suggested `x <= 0.0` would let NaN through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("skm-core needs either the `std` feature or the `libm` feature");

extern crate alloc;

mod math;
mod quad;

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod kernelmath;
pub mod lattice;

pub use error::{Error, Result};

/// Caps the global worker pool used for parallel experiment runs. Only the
/// first successful call takes effect. Results are bitwise identical for
/// any worker count.
#[cfg(feature = "parallel")]
pub fn configure_workers(n: usize) -> core::result::Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
}
