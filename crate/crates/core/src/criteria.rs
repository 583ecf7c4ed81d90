//! Entanglement criteria evaluated on moment reports.
//!
//! Each criterion is a strict inequality obeyed by every separable state.
//! A verdict reports both sides and a signed margin, positive when the
//! inequality is violated; detection requires the margin to exceed the
//! tolerance, so boundary cases are reported as not detected.

use crate::bounds::{bound_f, bound_fw, hyperbola_rhs};
use crate::error::{Error, Result};
use crate::fock::{MomentReport, SeparableEnsemble, TwoModeState};
use crate::tolerance::DETECTION;
use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionId {
    /// `(Delta(x_A + x_B))^2 + (Delta(p_A - p_B))^2 < 2`
    EprSum,
    /// `(Delta N)^2 + (Delta(a - b))^2 < f(<N>)`
    SimpleSum,
    /// `w (Delta N)^2 + (1 - w)(Delta(a - b))^2 < f_w(<N>)`
    WeightedSum(f64),
    /// `((Delta N)^2 + 1)((Delta(a - b))^2 + 1) < <N>/4 + 1/8`
    Hyperbola,
    /// Simple sum with `<(a^dag - b^dag)(a - b)>` in place of the variance.
    CountingSimple,
    /// Hyperbola with `<(a^dag - b^dag)(a - b)>` in place of the variance.
    CountingHyperbola,
    /// Partially transposed quadrature covariance test.
    CovariancePpt,
}

impl CriterionId {
    pub fn name(&self) -> &'static str {
        match self {
            CriterionId::EprSum => "epr_sum",
            CriterionId::SimpleSum => "simple_sum",
            CriterionId::WeightedSum(_) => "weighted_sum",
            CriterionId::Hyperbola => "hyperbola",
            CriterionId::CountingSimple => "counting_simple",
            CriterionId::CountingHyperbola => "counting_hyperbola",
            CriterionId::CovariancePpt => "covariance_ppt",
        }
    }

    pub fn weight(&self) -> Option<f64> {
        match self {
            CriterionId::WeightedSum(w) => Some(*w),
            _ => None,
        }
    }

    /// Variance criteria apply to mixtures; the covariance test does not.
    pub fn is_variance_criterion(&self) -> bool {
        !matches!(self, CriterionId::CovariancePpt)
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionId::WeightedSum(w) => write!(f, "weighted_sum(w={w})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionVerdict {
    pub criterion: CriterionId,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; positive means the separable-state inequality is violated.
    pub margin: f64,
    pub detected: bool,
}

impl CriterionVerdict {
    fn violation(criterion: CriterionId, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            criterion,
            lhs,
            rhs,
            margin,
            detected: margin > tol,
        }
    }
}

/// Quadrature covariance matrix in the ordering `x_A, p_A, x_B, p_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceReport {
    /// `gamma_kl = <{R_k - <R_k>, R_l - <R_l>}>`
    pub gamma: Matrix4<f64>,
    /// `gamma` after partial transposition (sign flip of `p_B`).
    pub gamma_pt: Matrix4<f64>,
    /// Smallest eigenvalue of the Hermitian matrix `gamma_pt - i J`.
    pub min_eig: f64,
}

/// `J_kl = i [R_k, R_l]` with `[x, p] = i`.
pub fn symplectic_j() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 1)] = -1.0;
    j[(1, 0)] = 1.0;
    j[(2, 3)] = -1.0;
    j[(3, 2)] = 1.0;
    j
}

/// Covariance matrix of a pure two-mode state and its partial-transpose
/// test matrix.
pub fn covariance_matrix(state: &TwoModeState) -> CovarianceReport {
    let q = state.quadrature_moments();
    let s2 = std::f64::consts::SQRT_2;
    let means = [s2 * q.a.re, s2 * q.a.im, s2 * q.b.re, s2 * q.b.im];

    // symmetrized second moments <R_k R_l + R_l R_k>
    let mut s = Matrix4::<f64>::zeros();
    s[(0, 0)] = 2.0 * (q.a2.re + q.na + 0.5);
    s[(1, 1)] = 2.0 * (-q.a2.re + q.na + 0.5);
    s[(0, 1)] = 2.0 * q.a2.im;
    s[(2, 2)] = 2.0 * (q.b2.re + q.nb + 0.5);
    s[(3, 3)] = 2.0 * (-q.b2.re + q.nb + 0.5);
    s[(2, 3)] = 2.0 * q.b2.im;
    s[(0, 2)] = 2.0 * (q.ab.re + q.adag_b.re);
    s[(1, 3)] = 2.0 * (q.adag_b.re - q.ab.re);
    s[(0, 3)] = 2.0 * (q.ab.im + q.adag_b.im);
    s[(1, 2)] = 2.0 * (q.ab.im - q.adag_b.im);
    for k in 0..4 {
        for l in 0..k {
            s[(k, l)] = s[(l, k)];
        }
    }
    let gamma = Matrix4::from_fn(|k, l| s[(k, l)] - 2.0 * means[k] * means[l]);

    let flip = [1.0, 1.0, 1.0, -1.0];
    let gamma_pt = Matrix4::from_fn(|k, l| flip[k] * flip[l] * gamma[(k, l)]);
    let j = symplectic_j();
    let test = Matrix4::from_fn(|k, l| Complex64::new(gamma_pt[(k, l)], -j[(k, l)]));
    let min_eig = SymmetricEigen::new(test)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    CovarianceReport {
        gamma,
        gamma_pt,
        min_eig,
    }
}

/// State or ensemble handed to [`Criteria::evaluate_all`].
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    Pure(&'a TwoModeState),
    Ensemble(&'a SeparableEnsemble),
}

/// Criterion evaluator with a fixed detection tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criteria {
    pub tolerance: f64,
}

impl Default for Criteria {
    fn default() -> Self {
        Self {
            tolerance: DETECTION,
        }
    }
}

impl Criteria {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance }
    }

    pub fn epr(&self, m: &MomentReport) -> CriterionVerdict {
        CriterionVerdict::violation(CriterionId::EprSum, m.epr_x + m.epr_p, 2.0, self.tolerance)
    }

    pub fn simple(&self, m: &MomentReport) -> Result<CriterionVerdict> {
        Ok(CriterionVerdict::violation(
            CriterionId::SimpleSum,
            m.var_n + m.var_diff,
            bound_f(m.mean_n.max(0.0))?,
            self.tolerance,
        ))
    }

    pub fn weighted(&self, m: &MomentReport, w: f64) -> Result<CriterionVerdict> {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::domain("w", w, "(0, 1)"));
        }
        Ok(CriterionVerdict::violation(
            CriterionId::WeightedSum(w),
            w * m.var_n + (1.0 - w) * m.var_diff,
            bound_fw(m.mean_n.max(0.0), w)?,
            self.tolerance,
        ))
    }

    pub fn hyperbola(&self, m: &MomentReport) -> Result<CriterionVerdict> {
        Ok(CriterionVerdict::violation(
            CriterionId::Hyperbola,
            (m.var_n + 1.0) * (m.var_diff + 1.0),
            hyperbola_rhs(m.mean_n.max(0.0))?,
            self.tolerance,
        ))
    }

    /// Counting variants `[simple, hyperbola]`. Since
    /// `counting_diff >= var_diff`, a detection here implies detection by
    /// the corresponding variance criterion.
    pub fn counting(&self, m: &MomentReport) -> Result<[CriterionVerdict; 2]> {
        let mean = m.mean_n.max(0.0);
        Ok([
            CriterionVerdict::violation(
                CriterionId::CountingSimple,
                m.var_n + m.counting_diff,
                bound_f(mean)?,
                self.tolerance,
            ),
            CriterionVerdict::violation(
                CriterionId::CountingHyperbola,
                (m.var_n + 1.0) * (m.counting_diff + 1.0),
                hyperbola_rhs(mean)?,
                self.tolerance,
            ),
        ])
    }

    /// Partial-transpose covariance test; `lhs` is the smallest eigenvalue
    /// of `gamma_pt - iJ`, detection means it is negative beyond tolerance.
    pub fn covariance_ppt(&self, state: &TwoModeState) -> CriterionVerdict {
        let cov = covariance_matrix(state);
        CriterionVerdict::violation(CriterionId::CovariancePpt, cov.min_eig, 0.0, self.tolerance)
    }

    /// All variance criteria on a moment report, in a fixed order.
    pub fn evaluate_moments(&self, m: &MomentReport, ws: &[f64]) -> Result<Vec<CriterionVerdict>> {
        let mut out = Vec::with_capacity(ws.len() + 5);
        out.push(self.epr(m));
        out.push(self.simple(m)?);
        for &w in ws {
            out.push(self.weighted(m, w)?);
        }
        out.push(self.hyperbola(m)?);
        out.extend(self.counting(m)?);
        Ok(out)
    }

    /// Every criterion in a deterministic order. The covariance test is
    /// only run for pure states; ensembles are judged by mixture moments.
    pub fn evaluate_all(&self, subject: Subject<'_>, ws: &[f64]) -> Result<Vec<CriterionVerdict>> {
        match subject {
            Subject::Pure(state) => {
                let mut out = self.evaluate_moments(&state.moments(), ws)?;
                out.push(self.covariance_ppt(state));
                Ok(out)
            }
            Subject::Ensemble(ens) => self.evaluate_moments(&ens.moments()?, ws),
        }
    }
}

pub fn crit_epr(m: &MomentReport) -> CriterionVerdict {
    Criteria::default().epr(m)
}

pub fn crit_simple(m: &MomentReport) -> Result<CriterionVerdict> {
    Criteria::default().simple(m)
}

pub fn crit_weighted(m: &MomentReport, w: f64) -> Result<CriterionVerdict> {
    Criteria::default().weighted(m, w)
}

pub fn crit_hyperbola(m: &MomentReport) -> Result<CriterionVerdict> {
    Criteria::default().hyperbola(m)
}

pub fn crit_counting(m: &MomentReport) -> Result<[CriterionVerdict; 2]> {
    Criteria::default().counting(m)
}

pub fn evaluate_all(subject: Subject<'_>, ws: &[f64]) -> Result<Vec<CriterionVerdict>> {
    Criteria::default().evaluate_all(subject, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squeezed_pair(lambda: f64, cutoff: usize) -> TwoModeState {
        let entries: Vec<_> = (0..=cutoff)
            .map(|n| (n, n, Complex64::new(lambda.powi(n as i32), 0.0)))
            .collect();
        TwoModeState::from_entries(&entries, true).unwrap()
    }

    #[test]
    fn binomial_hyperbola_margin() {
        let m = TwoModeState::binomial(200).unwrap().moments();
        let v = crit_hyperbola(&m).unwrap();
        assert!((v.margin - 49.125).abs() < 1e-9 && v.detected);
        assert!(!crit_epr(&m).detected);
    }

    #[test]
    fn vacuum_sits_on_every_boundary_without_detection() {
        let vac = TwoModeState::vacuum();
        let cov = covariance_matrix(&vac);
        assert!((cov.gamma - Matrix4::identity()).norm() < 1e-15);
        assert!(cov.min_eig.abs() < 1e-12);
        let all = evaluate_all(Subject::Pure(&vac), &[0.5]).unwrap();
        assert!(all.iter().all(|v| !v.detected), "{all:?}");
        let epr = &all[0];
        assert!((epr.lhs - 2.0).abs() < 1e-15);
    }

    #[test]
    fn anticorrelated_squeezing_is_detected_by_both_quadrature_tests() {
        // tanh r = 1/2 gives e^{-2r} = 1/3
        let s = squeezed_pair(-0.5, 80);
        let v = Criteria::default();
        let epr = v.epr(&s.moments());
        assert!((epr.lhs - 2.0 / 3.0).abs() < 1e-12 && epr.detected);
        let ppt = v.covariance_ppt(&s);
        assert!(ppt.detected && ppt.lhs < -0.1);
    }

    #[test]
    fn counting_threshold_on_synthetic_moments() {
        let mean: f64 = 100.0;
        let edge = mean / 4.0 - 7.0 / 8.0;
        for (var_n, expect) in [(edge - 1e-3, true), (edge + 1e-3, false), (0.0, true), (30.0, false)] {
            let [_, hyp] = crit_counting(&MomentReport::synthetic(mean, var_n, 0.0, 0.0)).unwrap();
            assert_eq!(hyp.detected, expect, "var_n = {var_n}");
        }
    }

    #[test]
    fn weights_outside_the_open_interval_are_rejected() {
        let m = MomentReport::synthetic(10.0, 1.0, 1.0, 1.0);
        for w in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(matches!(crit_weighted(&m, w), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn names_and_display() {
        assert_eq!(CriterionId::WeightedSum(0.3).to_string(), "weighted_sum(w=0.3)");
        assert_eq!(CriterionId::CovariancePpt.weight(), None);
        assert!(!CriterionId::CovariancePpt.is_variance_criterion());
    }
}
