//! Analytic lower bounds on single-mode uncertainty sums and on the two-mode
//! variance combinations of separable states.
//!
//! Every function accepts a real particle number because it is evaluated at
//! expectation values. Negative particle numbers and weights outside `(0, 1)`
//! are domain errors.

use crate::error::{Error, Result};
use serde::Serialize;

fn check_n(n: f64) -> Result<()> {
    if n >= 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("N", n, "[0, inf)"))
    }
}

fn check_w(w: f64) -> Result<()> {
    if w > 0.0 && w < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("w", w, "(0, 1)"))
    }
}

/// Validated weight `w` together with the crossover `N_L = (1 - w) / (4 w)`
/// where the weighted single-mode bound switches from linear to square-root
/// form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedBoundParams {
    pub w: f64,
    pub n_l: f64,
}

impl WeightedBoundParams {
    pub fn new(w: f64) -> Result<Self> {
        check_w(w)?;
        Ok(Self {
            w,
            n_l: (1.0 - w) / (4.0 * w),
        })
    }
}

/// Single-mode bound `L(N) = sqrt(N + 3/4) - 1` on
/// `(Delta N_A)^2 + (Delta a)^2`. Negative below `N = 1/4`.
pub fn bound_l(n: f64) -> Result<f64> {
    check_n(n)?;
    Ok(l_unchecked(n))
}

pub(crate) fn l_unchecked(n: f64) -> f64 {
    (n + 0.75).sqrt() - 1.0
}

/// Two-mode bound `f(N) = L(N) + L(0)` for the unweighted sum criterion.
pub fn bound_f(n: f64) -> Result<f64> {
    check_n(n)?;
    Ok((n + 0.75).sqrt() + 3f64.sqrt() / 2.0 - 2.0)
}

/// Weighted single-mode bound `L_w(N)`: square-root branch above `N_L`,
/// linear continuation with matching slope below.
pub fn bound_lw(n: f64, w: f64) -> Result<f64> {
    check_n(n)?;
    let p = WeightedBoundParams::new(w)?;
    Ok(lw_unchecked(n, &p))
}

pub(crate) fn lw_unchecked(n: f64, p: &WeightedBoundParams) -> f64 {
    let w = p.w;
    if n >= p.n_l {
        (w * (1.0 - w) * (n + 0.25) + w / 4.0).sqrt() - 0.5
    } else {
        (n - p.n_l) * w * (1.0 - w)
    }
}

/// `f_w(N) = L_w(N) + L_w(0)`.
pub fn bound_fw(n: f64, w: f64) -> Result<f64> {
    check_n(n)?;
    let p = WeightedBoundParams::new(w)?;
    Ok(lw_unchecked(n, &p) + lw_unchecked(0.0, &p))
}

/// `f~_w(N) = sqrt(w (1 - w) (N + 1/2)) - 1`, a weaker form of `f_w` whose
/// lines are exactly the tangents of the hyperbola criterion.
pub fn bound_f_tilde(n: f64, w: f64) -> Result<f64> {
    check_n(n)?;
    check_w(w)?;
    Ok((w * (1.0 - w) * (n + 0.5)).sqrt() - 1.0)
}

/// Right-hand side `<N>/4 + 1/8` of
/// `((Delta N)^2 + 1)((Delta(a - b))^2 + 1) >= <N>/4 + 1/8`.
pub fn hyperbola_rhs(mean_n: f64) -> Result<f64> {
    check_n(mean_n)?;
    Ok(mean_n / 4.0 + 0.125)
}

/// The two elementary bounds and their combination at a given `<a>`
/// fraction `alpha`, where `|<a>|^2 = alpha <N_A>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppendixBounds {
    /// Bound from `(Delta a)^2` alone.
    pub b1: f64,
    /// Bound from the quadrature-number uncertainty product.
    pub b2: f64,
    /// `max(b1, b2)` at this `alpha`.
    pub b: f64,
    /// Crossover fraction where `b1 = b2`; exceeds one for small `N`.
    pub alpha_l: f64,
    /// `min over alpha in [0, 1]` of `max(b1, b2)`.
    pub min_alpha_b: f64,
}

/// Elementary single-mode bounds, unweighted (`w = None`) or weighted.
///
/// `b1` decreases and `b2` increases with `alpha`, so `b1` is the larger of
/// the two for `alpha <= alpha_l` and `b2` above it. The minimum over
/// `alpha` is attained at the crossover, or at `alpha = 1` when the
/// crossover lies beyond one.
pub fn appendix_bounds(n: f64, alpha: f64, w: Option<f64>) -> Result<AppendixBounds> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain("alpha", alpha, "[0, 1]"));
    }
    let (b1, b2, alpha_l, min_alpha_b) = match w {
        None => {
            let b1 = (1.0 - alpha) * n;
            let b2 = (alpha * n).sqrt() - 0.5;
            let alpha_l = if n > 0.0 {
                ((1.0 + 0.75 / n).sqrt() - 0.5 / n.sqrt()).powi(2)
            } else {
                f64::INFINITY
            };
            let min_b = if n > 0.25 { l_unchecked(n) } else { 0.0 };
            (b1, b2, alpha_l, min_b)
        }
        Some(w) => {
            let p = WeightedBoundParams::new(w)?;
            let b1 = (1.0 - w) * (1.0 - alpha) * n;
            let b2 = (w * (1.0 - w) * alpha * n).sqrt() - (1.0 - w) / 2.0;
            let alpha_l = if n > 0.0 {
                let k = 4.0 * n * (1.0 - w);
                ((((2.0 - w) / k) + 1.0).sqrt() - (w / k).sqrt()).powi(2)
            } else {
                f64::INFINITY
            };
            let min_b = if n > p.n_l { lw_unchecked(n, &p) } else { 0.0 };
            (b1, b2, alpha_l, min_b)
        }
    };
    Ok(AppendixBounds {
        b1,
        b2,
        b: b1.max(b2),
        alpha_l,
        min_alpha_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn l_reference_values() {
        assert_abs_diff_eq!(bound_l(0.25).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bound_l(0.0).unwrap(), 3f64.sqrt() / 2.0 - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bound_l(0.0).unwrap(), -0.133_974_596_215_561, epsilon = 1e-15);
        assert_abs_diff_eq!(bound_l(20.0).unwrap(), 3.555_216_789_572_15, epsilon = 1e-12);
    }

    #[test]
    fn f_reference_values() {
        assert_abs_diff_eq!(bound_f(0.0).unwrap(), 3f64.sqrt() - 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bound_f(200.0).unwrap(), 13.034_652_719_089_193, epsilon = 1e-12);
        for n in [0.0, 0.3, 7.0, 123.4] {
            let lhs = bound_f(n).unwrap();
            let rhs = bound_l(n).unwrap() + bound_l(0.0).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        }
    }

    #[test]
    fn lw_reference_values() {
        for w in [0.05, 0.3, 0.5, 0.7, 0.95] {
            let p = WeightedBoundParams::new(w).unwrap();
            assert_abs_diff_eq!(bound_lw(p.n_l, w).unwrap(), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(
            bound_lw(20.0, 0.5).unwrap(),
            (20.75f64.sqrt() - 1.0) / 2.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(bound_lw(20.0, 0.5).unwrap(), 1.777_608, epsilon = 1e-6);
        assert_abs_diff_eq!(bound_lw(0.0, 0.5).unwrap(), -1.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn fw_is_sum_of_lw() {
        assert_abs_diff_eq!(
            bound_fw(0.0, 0.3).unwrap(),
            2.0 * bound_lw(0.0, 0.3).unwrap(),
            epsilon = 1e-15
        );
        let v = bound_fw(200.0, 0.3).unwrap();
        assert_abs_diff_eq!(
            v,
            bound_lw(200.0, 0.3).unwrap() + bound_lw(0.0, 0.3).unwrap(),
            epsilon = 1e-15
        );
        // w = 0.3: sqrt(0.21 * 200.25 + 0.075) - 0.5 - 0.1225
        assert_abs_diff_eq!(v, (0.21f64 * 200.25 + 0.075).sqrt() - 0.6225, epsilon = 1e-12);
    }

    #[test]
    fn f_tilde_values() {
        assert_abs_diff_eq!(
            bound_f_tilde(0.0, 0.5).unwrap(),
            (0.125f64).sqrt() - 1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(bound_f_tilde(0.0, 0.5).unwrap(), -0.646_447, epsilon = 1e-6);
        assert!((bound_f_tilde(10.0, 1e-12).unwrap() + 1.0).abs() < 1e-5);
    }

    #[test]
    fn hyperbola_values() {
        assert_abs_diff_eq!(hyperbola_rhs(3.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hyperbola_rhs(200.0).unwrap(), 50.125, epsilon = 1e-15);
        assert_abs_diff_eq!(hyperbola_rhs(0.0).unwrap(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(bound_l(-1e-3).is_err());
        assert!(bound_f(f64::NAN).is_err());
        assert!(bound_lw(1.0, 0.0).is_err());
        assert!(bound_lw(1.0, 1.0).is_err());
        assert!(bound_f_tilde(-1.0, 0.5).is_err());
        assert!(hyperbola_rhs(-2.0).is_err());
        assert!(appendix_bounds(1.0, 1.5, None).is_err());
    }

    #[test]
    fn appendix_endpoints() {
        let b = appendix_bounds(3.0, 1.0, None).unwrap();
        assert_eq!(b.b1, 0.0);
        let b = appendix_bounds(3.0, 0.0, None).unwrap();
        assert_eq!(b.b2, -0.5);
        assert_eq!(appendix_bounds(0.25, 0.5, None).unwrap().min_alpha_b, 0.0);
        assert_abs_diff_eq!(
            appendix_bounds(1.0, 0.5, None).unwrap().min_alpha_b,
            1.75f64.sqrt() - 1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            appendix_bounds(1.0, 0.5, None).unwrap().alpha_l,
            0.677,
            epsilon = 5e-4
        );
    }

    /// Brute-force minimum over a fine alpha grid of max(b1, b2).
    fn grid_min(n: f64, w: Option<f64>) -> f64 {
        (0..=200_000)
            .map(|i| appendix_bounds(n, i as f64 / 200_000.0, w).unwrap().b)
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn min_alpha_matches_grid_search() {
        for n in [0.1, 0.25, 0.6, 1.0, 5.0, 37.0] {
            let exact = appendix_bounds(n, 0.0, None).unwrap().min_alpha_b;
            assert_abs_diff_eq!(exact, grid_min(n, None), epsilon = 1e-4);
            for w in [0.2, 0.5, 0.8] {
                let exact = appendix_bounds(n, 0.0, Some(w)).unwrap().min_alpha_b;
                assert_abs_diff_eq!(exact, grid_min(n, Some(w)), epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn crossover_equates_the_two_bounds() {
        for n in [0.5, 2.0, 40.0] {
            let a = appendix_bounds(n, 0.0, None).unwrap().alpha_l;
            let b = appendix_bounds(n, a, None).unwrap();
            assert_abs_diff_eq!(b.b1, b.b2, epsilon = 1e-12);
            for w in [0.3, 0.6] {
                let a = appendix_bounds(n, 0.0, Some(w)).unwrap().alpha_l;
                if a <= 1.0 {
                    let b = appendix_bounds(n, a, Some(w)).unwrap();
                    assert_abs_diff_eq!(b.b1, b.b2, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn dominance_over_l() {
        for i in 0..=400 {
            let n = i as f64 * 0.05;
            let tight = appendix_bounds(n, 0.0, None).unwrap().min_alpha_b;
            let l = bound_l(n).unwrap();
            assert!(tight >= l - 1e-15);
            if n >= 0.25 {
                assert_abs_diff_eq!(tight, l, epsilon = 1e-15);
            }
        }
    }
}
