//! Independent reference machinery for validating `skm-core`.
//!
//! Everything here deliberately avoids the code paths it checks: quadrature
//! is double-exponential (tanh-sinh) instead of closed forms, extrema are
//! located by scanning instead of golden-section, and random sampling uses
//! a self-contained SplitMix64 generator.
//!
//! [`suite::run_all`] executes the named checks and returns one outcome per
//! check; the CLI `verify` command and the test suites are thin wrappers
//! around it.

pub mod quad;
pub mod rng;
pub mod suite;
