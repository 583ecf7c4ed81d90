//! Self-verification suite.
//!
//! Each check recomputes a fixture or property from scratch and reports a
//! one-line summary. `Quick` shrinks grids and sample counts; `Full` runs
//! them at their declared sizes.

use crate::bounds::{bound_f_tilde, bound_fw, bound_l, bound_lw, hyperbola_rhs, WeightedBoundParams};
use crate::criteria::{covariance_matrix, Criteria};
use crate::fock::{MomentReport, SingleModeState, TwoModeState};
use crate::minimizer::{
    default_cutoff, gaussian_fit, gaussian_trial, r_functional, solve_min_direct, solve_min_recurrence, Weighting,
};
use crate::numeric::golden_min;
use crate::sampler::{fig1_dataset, fig2_dataset, sample_separable, Family, Fig1Options, Fig2Method, PointSource};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn(Mode) -> Result<String, String>;

/// Names and bodies of every check, in run order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("kernel_fixture", kernel_fixture),
    ("covariance_fixture", covariance_fixture),
    ("epr_baseline", epr_baseline),
    ("hyperbola_threshold", hyperbola_threshold),
    ("counting_threshold", counting_threshold),
    ("bound_properties", bound_properties),
    ("soundness_monte_carlo", soundness),
    ("minimizer_cross_check", minimizer_cross_check),
    ("fig1_data", fig1_check),
    ("fig2_data", fig2_check),
];

/// Runs the checks whose names pass `filter`.
pub fn run_suite_filtered(mode: Mode, filter: impl Fn(&str) -> bool) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .filter(|(name, _)| filter(name))
        .map(|&(name, check)| {
            let start = Instant::now();
            let result = check(mode);
            let seconds = start.elapsed().as_secs_f64();
            match result {
                Ok(detail) => CheckOutcome {
                    name,
                    passed: true,
                    detail,
                    seconds,
                },
                Err(detail) => CheckOutcome {
                    name,
                    passed: false,
                    detail,
                    seconds,
                },
            }
        })
        .collect()
}

pub fn run_suite(mode: Mode) -> Vec<CheckOutcome> {
    run_suite_filtered(mode, |_| true)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn kernel_fixture(_: Mode) -> Result<String, String> {
    let worst = (1..=200usize)
        .into_par_iter()
        .map(|n| -> Result<f64, String> {
            let s = TwoModeState::binomial(n).map_err(err)?;
            let m = s.moments();
            Ok(s.apply_difference().norm().max(m.var_n.abs()).max(m.var_diff.abs()))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("largest residual {worst:.3e} exceeds 1e-12"))?;
    Ok(format!("N = 1..200, largest |(a-b)psi|, var_n, var_diff = {worst:.2e}"))
}

fn covariance_fixture(_: Mode) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for n in 1..=10usize {
        let cov = covariance_matrix(&TwoModeState::binomial(n).map_err(err)?);
        let nf = n as f64;
        for k in 0..4 {
            for l in 0..4 {
                let expected = if k == l {
                    nf + 1.0
                } else if (k + 2 == l) || (l + 2 == k) {
                    nf
                } else {
                    0.0
                };
                worst = worst.max((cov.gamma[(k, l)] - expected).abs());
            }
        }
        min_eig = min_eig.min(cov.min_eig);
    }
    ensure(worst <= 1e-10, || format!("gamma deviates by {worst:.3e}"))?;
    ensure(min_eig >= crate::tolerance::PSD, || format!("min eigenvalue {min_eig:.3e} below tolerance"))?;
    Ok(format!("N = 1..10, entry error {worst:.2e}, smallest test eigenvalue {min_eig:.3e}"))
}

fn epr_baseline(_: Mode) -> Result<String, String> {
    let criteria = Criteria::default();
    let mut worst: f64 = 0.0;
    for n in 0..=50usize {
        let v = criteria.epr(&TwoModeState::binomial(n).map_err(err)?.moments());
        worst = worst.max((v.lhs - (2.0 * n as f64 + 2.0)).abs());
        ensure(!v.detected, || format!("binomial N = {n} detected by the EPR sum"))?;
    }
    ensure(worst <= 1e-9, || format!("EPR sum deviates from 2N + 2 by {worst:.3e}"))?;
    Ok(format!("N = 0..50, |lhs - (2N + 2)| <= {worst:.2e}, never detected"))
}

fn hyperbola_threshold(mode: Mode) -> Result<String, String> {
    let top = if mode == Mode::Full { 200 } else { 60 };
    let criteria = Criteria::default();
    for n in 0..=top {
        let v = criteria.hyperbola(&TwoModeState::binomial(n).map_err(err)?.moments()).map_err(err)?;
        ensure(v.detected == (n >= 4), || format!("binomial N = {n}: detected = {}", v.detected))?;
    }
    Ok(format!("N = 0..{top}: detected exactly for N >= 4"))
}

fn counting_threshold(_: Mode) -> Result<String, String> {
    let criteria = Criteria::default();
    let mut checked = 0;
    let mut worst_diag: f64 = 0.0;
    for k in 0..400 {
        let mean = 3.6 + k as f64 * 0.5;
        let threshold = mean / 4.0 - 7.0 / 8.0;
        for (var, expect) in [(threshold - 1e-7, true), (threshold + 1e-7, false)] {
            if var < 0.0 {
                continue;
            }
            let m = MomentReport::synthetic(mean, var, 0.0, 0.0);
            let v = criteria.counting(&m).map_err(err)?[1];
            ensure(v.detected == expect, || {
                format!("<N> = {mean}, var_n = {var}: detected = {}", v.detected)
            })?;
            checked += 1;
        }
        // boundary along var_n = var_diff, located by bisection on the verdict
        let detects = |x: f64| -> bool {
            criteria
                .hyperbola(&MomentReport::synthetic(mean, x, x, x))
                .map(|v| v.detected)
                .unwrap_or(false)
        };
        let expected = (hyperbola_rhs(mean).map_err(err)?).sqrt() - 1.0;
        let (mut lo, mut hi) = (0.0, expected + 1.0);
        if !detects(lo) {
            return Err(format!("<N> = {mean}: origin not detected"));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if detects(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        worst_diag = worst_diag.max((lo - expected).abs());
    }
    ensure(worst_diag <= 1e-9, || format!("diagonal boundary off by {worst_diag:.3e}"))?;
    Ok(format!(
        "{checked} threshold probes around <N>/4 - 7/8; diagonal boundary error {worst_diag:.2e}"
    ))
}

/// `N` grid, log-uniform over `[1e-3, 400]`.
pub fn n_grid(points: usize) -> Vec<f64> {
    let (lo, hi) = (1e-3f64.ln(), 400f64.ln());
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// `w` grid over `[0.01, 0.99]`.
pub fn w_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| 0.01 + 0.98 * i as f64 / (points - 1) as f64)
        .collect()
}

/// Smallest gap between the boundary curve and the `w` tangent line, found
/// numerically over the curve parameter.
pub fn tangency_gap(n: f64, w: f64) -> f64 {
    let rhs = n / 4.0 + 0.125;
    let ft = bound_f_tilde(n, w).expect("grid values are in the domain");
    // curve y(x) = rhs/(x+1) - 1, line y(x) = (ft - w x)/(1 - w); u = ln(x+1)
    let gap = |u: f64| {
        let x = u.exp() - 1.0;
        (rhs / (x + 1.0) - 1.0) - (ft - w * x) / (1.0 - w)
    };
    let touch = 0.5 * (rhs * (1.0 - w) / w).ln();
    golden_min(gap, touch - 3.0, touch + 3.0, 1e-12, 300).1
}

/// `min_w [w x + (1 - w) y - f~_w(N)]` over `w in (0, 1)`.
pub fn envelope_min(x: f64, y: f64, n: f64) -> f64 {
    let g = |w: f64| w * x + (1.0 - w) * y - bound_f_tilde(n, w).unwrap_or(f64::INFINITY);
    golden_min(g, 1e-9, 1.0 - 1e-9, 1e-13, 300).1
}

fn bound_properties(mode: Mode) -> Result<String, String> {
    let (np, wp) = match mode {
        Mode::Full => (500, 99),
        Mode::Quick => (120, 25),
    };
    let ns = n_grid(np);
    let ws = w_grid(wp);
    let l = |n: f64| bound_l(n).expect("grid in domain");
    let lw = |n: f64, w: f64| bound_lw(n, w).expect("grid in domain");

    // superadditivity
    let worst_sa = ns
        .par_iter()
        .map(|&a| {
            let mut worst = f64::INFINITY;
            for &b in &ns {
                worst = worst.min(l(a) + l(b) - l(a + b) - l(0.0));
                for &w in &ws {
                    worst = worst.min(lw(a, w) + lw(b, w) - lw(a + b, w) - lw(0.0, w));
                }
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min);
    ensure(worst_sa >= -1e-12, || format!("superadditivity fails by {:.3e}", -worst_sa))?;

    // convexity of L + N^2 and L_w + w N^2
    let mut worst_cx = f64::INFINITY;
    for &n in &ns {
        let h = 1e-3 * (1.0 + n);
        let lo = (n - h).max(0.0);
        let hi = lo + 2.0 * h;
        let mid = lo + h;
        let g = |x: f64| l(x) + x * x;
        worst_cx = worst_cx.min((g(hi) - 2.0 * g(mid) + g(lo)) / (h * h));
        for &w in &ws {
            let gw = |x: f64| lw(x, w) + w * x * x;
            worst_cx = worst_cx.min((gw(hi) - 2.0 * gw(mid) + gw(lo)) / (h * h));
        }
    }
    ensure(worst_cx > 0.0, || format!("second difference {worst_cx:.3e} is not positive"))?;

    // the tangent-line bound is weaker than f_w
    let mut worst_ft = f64::NEG_INFINITY;
    for i in 0..np {
        let n = 400.0 * i as f64 / (np - 1) as f64;
        for &w in &ws {
            let d = bound_f_tilde(n, w).map_err(err)? - bound_fw(n, w).map_err(err)?;
            worst_ft = worst_ft.max(d);
        }
    }
    ensure(worst_ft <= 1e-12, || format!("f~_w exceeds f_w by {worst_ft:.3e}"))?;

    // continuity and matching slope at N_L
    let mut worst_c1: f64 = 0.0;
    let mut worst_c0: f64 = 0.0;
    let h = 1e-7;
    for &w in &ws {
        let nl = WeightedBoundParams::new(w).map_err(err)?.n_l;
        let at = lw(nl, w);
        worst_c0 = worst_c0.max(at.abs()).max((lw(nl + 1e-12, w) - at).abs());
        if nl > h {
            let left = (at - lw(nl - h, w)) / h;
            let right = (lw(nl + h, w) - at) / h;
            worst_c1 = worst_c1.max((left - right).abs());
        }
    }
    ensure(worst_c0 <= 1e-9, || format!("L_w discontinuous at N_L by {worst_c0:.3e}"))?;
    ensure(worst_c1 <= 1e-6, || format!("slope gap at N_L {worst_c1:.3e}"))?;

    // tangency of the w lines to the boundary curve
    let worst_tan = ns
        .par_iter()
        .map(|&n| ws.iter().map(|&w| tangency_gap(n, w).abs()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    ensure(worst_tan <= 1e-9, || format!("tangency gap {worst_tan:.3e}"))?;

    // envelope: lines above <=> outside the curve, away from the boundary
    let mut mismatches = 0;
    let mut probes = 0;
    for &n in ns.iter().step_by(np / 25) {
        let rhs = hyperbola_rhs(n).map_err(err)?;
        for i in 0..30 {
            for j in 0..30 {
                let x = i as f64 * 0.1 * (1.0 + n.sqrt());
                let y = j as f64 * 0.1 * (1.0 + n.sqrt());
                let curve = (x + 1.0) * (y + 1.0) - rhs;
                if curve.abs() < 1e-6 {
                    continue;
                }
                probes += 1;
                if (envelope_min(x, y, n) >= -1e-12) != (curve >= 0.0) {
                    mismatches += 1;
                }
            }
        }
    }
    ensure(mismatches == 0, || format!("envelope disagrees with the curve at {mismatches} of {probes} points"))?;

    Ok(format!(
        "{np} N x {wp} w: superadditivity slack {worst_sa:.2e}, min second difference {worst_cx:.3e}, \
         max f~_w - f_w {worst_ft:.2e}, slope gap {worst_c1:.2e}, tangency {worst_tan:.2e}, \
         envelope {probes} probes"
    ))
}

/// Detections of every variance criterion over sampled separable ensembles.
pub fn soundness_detections(seed: u64, count: usize, n_max: f64, family: Family) -> crate::Result<usize> {
    let ws: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let criteria = Criteria::default();
    let ensembles = sample_separable(seed, count, n_max, family)?;
    let hits = ensembles
        .par_iter()
        .map(|e| -> crate::Result<usize> {
            let m = e.moments()?;
            Ok(criteria.evaluate_moments(&m, &ws)?.iter().filter(|v| v.detected).count())
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(hits.into_iter().sum())
}

fn soundness(mode: Mode) -> Result<String, String> {
    let count = if mode == Mode::Full { 10_000 } else { 2_000 };
    let mut parts = Vec::new();
    for (i, family) in Family::ALL.into_iter().enumerate() {
        let hits = soundness_detections(2024 + i as u64, count, 50.0, family).map_err(err)?;
        ensure(hits == 0, || format!("{family}: {hits} detections on separable ensembles"))?;
        parts.push(family.name());
    }
    Ok(format!("{count} ensembles per family ({}), zero detections", parts.join(", ")))
}

/// Targets on which the two minimizer routes are compared.
pub const CROSS_CHECK_TARGETS: [f64; 7] = [1.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0];

fn minimizer_cross_check(mode: Mode) -> Result<String, String> {
    let rows = CROSS_CHECK_TARGETS
        .par_iter()
        .map(|&t| -> Result<(f64, f64, f64), String> {
            let cutoff = default_cutoff(t);
            let rec = solve_min_recurrence(t, cutoff).map_err(err)?;
            let dir = solve_min_direct(t, Weighting::Equal, cutoff).map_err(err)?;
            let trial = gaussian_trial(t, Weighting::Equal, cutoff).map_err(err)?.value;
            let l = bound_l(t).map_err(err)?;
            let diff = (rec.value - dir.value).abs();
            ensure(diff <= 1e-6, || format!("N = {t}: routes differ by {diff:.3e}"))?;
            for v in [rec.value, dir.value] {
                ensure(v >= l - 1e-9, || format!("N = {t}: value {v} below L = {l}"))?;
                ensure(v <= trial + 1e-9, || format!("N = {t}: value {v} above Gaussian trial {trial}"))?;
            }
            ensure(dir.residuals.stationarity <= 1e-6, || {
                format!("N = {t}: stationarity residual {:.3e}", dir.residuals.stationarity)
            })?;
            Ok((diff, dir.value - l, trial - dir.value))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);

    let at20 = solve_min_recurrence(20.0, default_cutoff(20.0)).map_err(err)?;
    let fit = gaussian_fit(&at20.state).map_err(err)?;
    ensure(fit.r_squared >= 0.99, || format!("Gaussian fit R^2 = {}", fit.r_squared))?;

    // complex phases never lower the functional below the real minimum
    let perturbations = if mode == Mode::Full { 200 } else { 40 };
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let base = r_functional(&at20.state, Weighting::Equal);
    for _ in 0..perturbations {
        let amps: Vec<Complex64> = at20
            .state
            .amplitudes()
            .iter()
            .map(|c| c * Complex64::from_polar(1.0, 0.3 * (rng.random::<f64>() - 0.5)))
            .collect();
        let r = r_functional(&SingleModeState::new(amps).map_err(err)?, Weighting::Equal);
        ensure(r >= base - 1e-10, || format!("phase perturbation lowered R to {r} < {base}"))?;
    }
    Ok(format!(
        "N in {{1,5,10,20,50,100,200}}: largest route difference {worst:.2e}; R^2 at N = 20 is {:.5}; \
         {perturbations} phase perturbations",
        fit.r_squared
    ))
}

fn fig1_check(mode: Mode) -> Result<String, String> {
    let opts = Fig1Options {
        count: if mode == Mode::Full { 2000 } else { 300 },
        ..Fig1Options::default()
    };
    let data = fig1_dataset(&opts).map_err(err)?;
    ensure(data.violations == 0, || format!("{} separable points violate a criterion", data.violations))?;
    let probe = data
        .points
        .iter()
        .find(|p| p.source == PointSource::EntangledProbe)
        .ok_or("no binomial probe")?;
    ensure(probe.var_n.abs() < 1e-12 && probe.var_diff.abs() < 1e-12, || {
        format!("probe at ({}, {})", probe.var_n, probe.var_diff)
    })?;
    Ok(format!(
        "<N> = 200: {} separable points, 0 violations, min line gap {:.3}, min curve gap {:.3}",
        data.separable_points, data.min_line_gap, data.min_curve_gap
    ))
}

fn fig2_check(mode: Mode) -> Result<String, String> {
    let grid: Vec<f64> = match mode {
        Mode::Full => std::iter::once(0.25).chain((1..=200).map(f64::from)).collect(),
        Mode::Quick => vec![0.25, 1.0, 5.0, 20.0, 50.0],
    };
    let data = fig2_dataset(&grid, Fig2Method::Both).map_err(err)?;
    let mut min_gap = f64::INFINITY;
    for row in &data.rows {
        let gap = row
            .gap()
            .ok_or_else(|| format!("N = {}: {}", row.target_n, row.error.clone().unwrap_or_default()))?;
        ensure(gap >= -1e-9, || format!("N = {}: negative gap {gap:.3e}", row.target_n))?;
        min_gap = min_gap.min(gap);
    }
    ensure(data.inset.fit.r_squared >= 0.99, || format!("inset R^2 {}", data.inset.fit.r_squared))?;
    Ok(format!(
        "{} rows, smallest gap {min_gap:.3e}, inset R^2 {:.5}",
        data.rows.len(),
        data.inset.fit.r_squared
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_have_declared_extent() {
        let ns = n_grid(500);
        assert!((ns[0] - 1e-3).abs() < 1e-15 && (ns[499] - 400.0).abs() < 1e-9);
        let ws = w_grid(99);
        assert!((ws[0] - 0.01).abs() < 1e-15 && (ws[98] - 0.99).abs() < 1e-12);
    }

    #[test]
    fn tangency_is_exact_on_samples() {
        for &(n, w) in &[(0.0, 0.5), (3.5, 0.2), (200.0, 0.7), (400.0, 0.99)] {
            assert!(tangency_gap(n, w).abs() < 1e-9, "{n} {w}");
        }
    }

    #[test]
    fn quick_fixture_checks_pass() {
        let names = ["kernel_fixture", "covariance_fixture", "epr_baseline", "counting_threshold"];
        for outcome in run_suite_filtered(Mode::Quick, |n| names.contains(&n)) {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
