//! A laboratory for single-item auctions with correlated bidder values.
//!
//! The crate builds the market-shrinkage hard instance (a correlated joint
//! distribution with a weak bidder), computes optimal and k-lookahead
//! revenues exactly through a dense linear program, implements explicit
//! mechanisms together with two revenue-preserving mechanism
//! transformations, and evaluates the closed-form revenue ratio that tends
//! to `e/(e+1)`.
//!
//! Modules:
//! - [`distributions`]: balanced variables, the equal-revenue family, finite
//!   joint distributions and the truncated hard instances.
//! - [`mechanisms`]: mechanism tables, axiom validation, threshold payments,
//!   explicit mechanisms and transformations.
//! - [`optimal`]: the revenue LP, a Bland-rule simplex and a brute-force
//!   deterministic oracle.
//! - [`analysis`]: closed forms, the gap sweep, identity checks and Monte
//!   Carlo cross-checks.
//! - [`cli`]: the command-line front end used by the `shrinkage` binary.

pub mod analysis;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod mechanisms;
pub mod optimal;

pub use error::{Error, Result};

/// `e/(e-1)`, the revenue of every distribution in the equal-revenue family.
pub const DEFAULT_Z: f64 = std::f64::consts::E / (std::f64::consts::E - 1.0);

/// `e/(e+1)`, the limiting revenue ratio.
pub const LIMIT_RATIO: f64 = std::f64::consts::E / (std::f64::consts::E + 1.0);

/// Tolerance for probability normalisation.
pub const PROB_TOL: f64 = 1e-12;

/// Tolerance for mechanism axiom checks.
pub const AXIOM_TOL: f64 = 1e-9;
