//! Constrained minimisation of the single-mode uncertainty functional
//! `R_w = c_N (Delta N_A)^2 + c_a (Delta a)^2` at fixed `<N_A>`.
//!
//! Two independent routes are provided. [`solve_min_recurrence`] generates
//! stationary states from the three-term recurrence of the Lagrange
//! conditions and searches its parameters; [`solve_min_direct`] runs a
//! Newton iteration on the full constrained problem in amplitude space.
//! [`gaussian_trial`] evaluates the functional over Gaussian-shaped
//! amplitude profiles, giving an upper bound and the starting point for the
//! direct route.

mod direct;
mod gaussian;
mod recurrence;

pub use direct::solve_min_direct;
pub use gaussian::{gaussian_fit, gaussian_trial, gaussian_trial_bound, GaussianFit, GaussianTrial};
pub use recurrence::{recurrence_generate, solve_min_recurrence, RecurrenceParams};

use crate::bounds::{bound_l, bound_lw};
use crate::error::{Error, Result};
use crate::fock::SingleModeState;
use serde::Serialize;

/// Relative weights of the two variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Weighting {
    /// `(Delta N_A)^2 + (Delta a)^2`
    Equal,
    /// `w (Delta N_A)^2 + (1 - w)(Delta a)^2`
    Weighted(f64),
}

impl Weighting {
    pub fn coefficients(&self) -> (f64, f64) {
        match *self {
            Weighting::Equal => (1.0, 1.0),
            Weighting::Weighted(w) => (w, 1.0 - w),
        }
    }

    /// Matching analytic lower bound at `<N_A> = n`.
    pub fn bound(&self, n: f64) -> Result<f64> {
        match *self {
            Weighting::Equal => bound_l(n),
            Weighting::Weighted(w) => bound_lw(n, w),
        }
    }

    pub(crate) fn validate(&self, allow_one: bool) -> Result<()> {
        match *self {
            Weighting::Equal => Ok(()),
            Weighting::Weighted(w) if w > 0.0 && (w < 1.0 || (allow_one && w == 1.0)) => Ok(()),
            Weighting::Weighted(w) => Err(Error::domain("w", w, "(0, 1]")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinMethod {
    Recurrence,
    Direct,
}

impl MinMethod {
    pub fn name(&self) -> &'static str {
        match self {
            MinMethod::Recurrence => "recurrence",
            MinMethod::Direct => "direct",
        }
    }
}

/// Diagnostics attached to a converged minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `|<N_A> - target|`
    pub constraint: f64,
    /// `|sum c^2 - 1|`
    pub norm: f64,
    /// `|A - <a>|` for the recurrence route, zero for the direct route.
    pub self_consistency: f64,
    /// Largest residual of the stationarity recurrence with least-squares
    /// multipliers, relative to the largest diagonal term.
    pub stationarity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinResult {
    /// Minimising state with real non-negative amplitudes.
    pub state: SingleModeState,
    pub value: f64,
    pub target_n: f64,
    pub weighting: Weighting,
    pub residuals: Residuals,
    pub method: MinMethod,
    /// Recurrence parameters, implied by least squares for the direct route.
    pub params: RecurrenceParams,
}

impl MinResult {
    pub fn bound(&self) -> f64 {
        self.weighting.bound(self.target_n).unwrap_or(f64::NAN)
    }

    /// `value - bound`.
    pub fn gap(&self) -> f64 {
        self.value - self.bound()
    }

    pub fn real_amplitudes(&self) -> Vec<f64> {
        self.state.amplitudes().iter().map(|c| c.re).collect()
    }
}

/// Default basis size for a target particle number.
pub fn default_cutoff(target_n: f64) -> usize {
    let t = target_n.max(0.0);
    (t + 10.0 * t.sqrt() + 25.0).ceil().max(50.0) as usize
}

/// `c_N (Delta N_A)^2 + c_a (Delta a)^2` for any normalized state.
pub fn r_functional(state: &SingleModeState, weighting: Weighting) -> f64 {
    let (cn, ca) = weighting.coefficients();
    let m = state.moments();
    cn * m.var_n + ca * m.var_a
}

/// Same functional on real, normalized amplitudes.
pub(crate) fn r_real(c: &[f64], cn: f64, ca: f64) -> f64 {
    let mean: f64 = c.iter().enumerate().map(|(k, x)| k as f64 * x * x).sum();
    let var_n: f64 = c
        .iter()
        .enumerate()
        .map(|(k, x)| (k as f64 - mean).powi(2) * x * x)
        .sum();
    let a = mean_a_real(c);
    let var_a: f64 = (0..c.len())
        .map(|k| {
            let lowered = c.get(k + 1).map_or(0.0, |x| x * ((k + 1) as f64).sqrt());
            (lowered - a * c[k]).powi(2)
        })
        .sum();
    cn * var_n + ca * var_a
}

pub(crate) fn mean_real(c: &[f64]) -> f64 {
    c.iter().enumerate().map(|(k, x)| k as f64 * x * x).sum()
}

pub(crate) fn mean_a_real(c: &[f64]) -> f64 {
    c.windows(2)
        .enumerate()
        .map(|(k, w)| w[0] * w[1] * ((k + 1) as f64).sqrt())
        .sum()
}

/// Least-squares multipliers `(mu1, mu2)` for the generalized stationarity
/// recurrence `(c_N n^2 + mu1 n + mu2) c_n = c_a A (sqrt(n) c_{n-1} + sqrt(n+1) c_{n+1})`
/// and the largest relative residual.
pub(crate) fn stationarity(c: &[f64], cn: f64, ca: f64) -> (RecurrenceParams, f64) {
    let a = mean_a_real(c);
    let len = c.len();
    // r_n = base_n + mu1 * (n c_n) + mu2 * c_n
    let base: Vec<f64> = (0..len)
        .map(|n| {
            let nf = n as f64;
            let prev = if n > 0 { nf.sqrt() * c[n - 1] } else { 0.0 };
            let next = if n + 1 < len {
                (nf + 1.0).sqrt() * c[n + 1]
            } else {
                0.0
            };
            cn * nf * nf * c[n] - ca * a * (prev + next)
        })
        .collect();
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in 0..len {
        let u = n as f64 * c[n];
        let v = c[n];
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        t1 -= u * base[n];
        t2 -= v * base[n];
    }
    let det = s11 * s22 - s12 * s12;
    let (mu1, mu2) = if det.abs() > 0.0 {
        ((t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det)
    } else {
        (0.0, t2 / s22.max(f64::MIN_POSITIVE))
    };
    let scale = (0..len)
        .map(|n| cn * (n * n) as f64 * c[n].abs())
        .fold(1.0, f64::max);
    let worst = (0..len)
        .map(|n| (base[n] + mu1 * n as f64 * c[n] + mu2 * c[n]).abs())
        .fold(0.0, f64::max);
    (
        RecurrenceParams {
            a,
            mu1,
            mu2,
            cutoff: len - 1,
        },
        worst / scale,
    )
}

fn validate_target(target_n: f64) -> Result<()> {
    if target_n > 0.0 && target_n.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("target_n", target_n, "(0, inf)"))
    }
}

fn validate_cutoff(target_n: f64, cutoff: usize) -> Result<()> {
    crate::fock::check_cutoff(cutoff)?;
    if cutoff < 10 || (cutoff as f64) < target_n + 3.0 * target_n.sqrt() + 5.0 {
        return Err(Error::Validation(format!(
            "cutoff {cutoff} is too small for target <N> = {target_n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn functional_on_number_states() {
        assert_eq!(r_functional(&SingleModeState::vacuum(), Weighting::Equal), 0.0);
        for k in 1..8 {
            let s = SingleModeState::number(k).unwrap();
            assert!((r_functional(&s, Weighting::Equal) - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn functional_on_coherent_state_is_poisson_variance() {
        let alpha = Complex64::new(2.0, 1.0);
        let s = SingleModeState::coherent(alpha, 1e-14).unwrap();
        let r = r_functional(&s, Weighting::Equal);
        assert!((r - 5.0).abs() < 1e-8, "{r}");
    }

    #[test]
    fn real_and_complex_paths_agree() {
        let c = [0.3, 0.5, -0.2, 0.7, 0.1];
        let s = SingleModeState::from_real(&c).unwrap();
        let norm: Vec<f64> = s.amplitudes().iter().map(|z| z.re).collect();
        for w in [Weighting::Equal, Weighting::Weighted(0.3)] {
            let (cn, ca) = w.coefficients();
            assert!((r_functional(&s, w) - r_real(&norm, cn, ca)).abs() < 1e-13);
        }
    }

    #[test]
    fn cutoff_rule() {
        assert_eq!(default_cutoff(1.0), 50);
        assert_eq!(default_cutoff(200.0), 367);
    }
}
