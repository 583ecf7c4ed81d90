//! Variance-based entanglement detection for two-mode bosonic systems.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`fock`] holds truncated two-mode states, separable ensembles and the
//!   exact moment computations every criterion consumes.
//! * [`bounds`] collects the analytic single-mode and two-mode lower bounds.
//! * [`criteria`] turns moments into detection verdicts, including the
//!   quadrature covariance-matrix partial-transpose test.
//! * [`minimizer`] numerically minimises the single-mode uncertainty
//!   functional under a particle-number constraint, by two independent routes.
//! * [`sampler`] draws seeded separable ensembles and builds the plane and
//!   minimum tables used for figure reproduction.
//! * [`verify`] bundles the property checks into a runnable suite.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod criteria;
pub mod error;
pub mod fock;
pub mod minimizer;
mod numeric;
pub mod sampler;
pub mod statefile;
pub mod table;
pub mod tolerance;
pub mod verify;

pub use criteria::{CovarianceReport, CriterionId, CriterionVerdict, Subject};
pub use error::{Error, Result};
pub use fock::{
    Mode, MomentReport, ProductComponent, SeparableEnsemble, SingleModeState, TwoModeState,
    TwoModeVector,
};
pub use minimizer::{MinMethod, MinResult, RecurrenceParams, Weighting};
pub use sampler::{Family, PlanePoint, PointSource};

pub use num_complex::Complex64;
