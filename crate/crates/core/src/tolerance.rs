//! Numerical tolerances shared across modules.

/// Allowed deviation of `sum |c|^2` from one.
pub const NORMALIZATION: f64 = 1e-10;

/// Default tail mass allowed when truncating an infinite-support state.
pub const LEAKAGE: f64 = 1e-12;

/// A criterion counts as violated only when its margin exceeds this.
pub const DETECTION: f64 = 1e-9;

/// Smallest eigenvalue of the partially transposed covariance test matrix
/// that still counts as positive semidefinite.
pub const PSD: f64 = -1e-9;

/// Constraint accuracy demanded from the constrained minimizers.
pub const CONSTRAINT: f64 = 1e-8;

/// Absolute change in the functional value treated as converged.
pub const VALUE_CONVERGENCE: f64 = 1e-10;

/// Maximum cutoff (highest number state) per mode.
pub const MAX_CUTOFF: usize = 1024;
