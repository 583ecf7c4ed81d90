use super::{sample_separable_at, Family};
use crate::bounds::{bound_f, bound_f_tilde, bound_fw, hyperbola_rhs};
use crate::criteria::Criteria;
use crate::error::{Error, Result};
use crate::fock::{MomentReport, SeparableEnsemble, SingleModeState, TwoModeState};
use crate::minimizer::{default_cutoff, solve_min_direct, Weighting};
use rayon::prelude::*;
use serde::Serialize;

/// Origin of a point in the `(Delta N)^2`-`(Delta(a - b))^2` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    SeparableSample(Family),
    /// `|0> (x) |psi>` with `|psi>` minimising the weighted functional.
    OptimizedProduct(f64),
    /// `((Delta N)^2 + 1)((Delta(a - b))^2 + 1) = <N>/4 + 1/8`
    BoundaryCurve,
    /// `x + y = f(<N>)`
    SimpleLine,
    /// `w x + (1 - w) y = f_w(<N>)`
    WeightedLine(f64),
    /// `w x + (1 - w) y = f~_w(<N>)`, tangent to the boundary curve.
    TangentLine(f64),
    /// Binomial interference state.
    EntangledProbe,
}

impl PointSource {
    pub fn name(&self) -> String {
        match self {
            PointSource::SeparableSample(f) => format!("separable_{f}"),
            PointSource::OptimizedProduct(_) => "optimized_product".into(),
            PointSource::BoundaryCurve => "boundary_curve".into(),
            PointSource::SimpleLine => "simple_line".into(),
            PointSource::WeightedLine(_) => "weighted_line".into(),
            PointSource::TangentLine(_) => "tangent_line".into(),
            PointSource::EntangledProbe => "entangled_probe".into(),
        }
    }

    pub fn weight(&self) -> Option<f64> {
        match *self {
            PointSource::OptimizedProduct(w) | PointSource::WeightedLine(w) | PointSource::TangentLine(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, PointSource::SeparableSample(_) | PointSource::OptimizedProduct(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    pub var_n: f64,
    pub var_diff: f64,
    pub mean_n: f64,
    pub source: PointSource,
}

/// Boundary curve, simple-sum line and one tangent line per `w`, clipped to
/// the first quadrant.
///
/// The curve gets `resolution` points evenly spaced in `x`; each line is
/// given by its two axis intercepts.
pub fn boundary_scan(mean_n: f64, w_grid: &[f64], resolution: usize) -> Result<Vec<PlanePoint>> {
    if !(mean_n > 0.0) || !mean_n.is_finite() {
        return Err(Error::domain("mean_n", mean_n, "(0, inf)"));
    }
    if resolution < 2 {
        return Err(Error::Validation("resolution must be at least 2".into()));
    }
    let mut out = Vec::new();
    let point = |x: f64, y: f64, source| PlanePoint {
        var_n: x,
        var_diff: y,
        mean_n,
        source,
    };
    let rhs = hyperbola_rhs(mean_n)?;
    if rhs >= 1.0 {
        let x_max = rhs - 1.0;
        for i in 0..resolution {
            let x = x_max * i as f64 / (resolution - 1) as f64;
            let y = (rhs / (x + 1.0) - 1.0).max(0.0);
            out.push(point(x, y, PointSource::BoundaryCurve));
        }
    }
    let f = bound_f(mean_n)?;
    if f > 0.0 {
        out.push(point(0.0, f, PointSource::SimpleLine));
        out.push(point(f, 0.0, PointSource::SimpleLine));
    }
    for &w in w_grid {
        let ft = bound_f_tilde(mean_n, w)?;
        if ft > 0.0 {
            out.push(point(0.0, ft / (1.0 - w), PointSource::TangentLine(w)));
            out.push(point(ft / w, 0.0, PointSource::TangentLine(w)));
        }
    }
    Ok(out)
}

/// Settings for [`fig1_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Options {
    pub mean_n: f64,
    pub seed: u64,
    /// Random samples per family.
    pub count: usize,
    /// Weights of the weighted-sum lines (and their tangent counterparts).
    pub line_weights: Vec<f64>,
    /// Weights at which `|0> (x) |psi_opt>` products are added.
    pub optimized_weights: Vec<f64>,
    /// Weights checked for violations besides the fixed criteria.
    pub check_weights: Vec<f64>,
    pub resolution: usize,
    pub families: Vec<Family>,
}

impl Default for Fig1Options {
    fn default() -> Self {
        Self {
            mean_n: 200.0,
            seed: 1,
            count: 2000,
            line_weights: vec![0.3, 0.7],
            optimized_weights: (1..20).map(|k| k as f64 * 0.05).collect(),
            check_weights: (1..10).map(|k| k as f64 * 0.1).collect(),
            resolution: 400,
            families: Family::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Data {
    pub points: Vec<PlanePoint>,
    /// Separable points detected by any variance criterion.
    pub violations: usize,
    pub separable_points: usize,
    /// Smallest `x + y - f(<N>)` over separable points.
    pub min_line_gap: f64,
    /// Smallest `(x + 1)(y + 1) - (<N>/4 + 1/8)` over separable points.
    pub min_curve_gap: f64,
}

/// Plane data at fixed `<N>`: boundaries, lines, separable samples,
/// optimized products and the binomial probe.
pub fn fig1_dataset(opts: &Fig1Options) -> Result<Fig1Data> {
    let mean_n = opts.mean_n;
    let mut points = boundary_scan(mean_n, &opts.line_weights, opts.resolution)?;
    for &w in &opts.line_weights {
        let fw = bound_fw(mean_n, w)?;
        if fw > 0.0 {
            let line = PointSource::WeightedLine(w);
            points.push(PlanePoint {
                var_n: 0.0,
                var_diff: fw / (1.0 - w),
                mean_n,
                source: line,
            });
            points.push(PlanePoint {
                var_n: fw / w,
                var_diff: 0.0,
                mean_n,
                source: line,
            });
        }
    }

    let mut separable: Vec<(PointSource, MomentReport)> = Vec::new();
    for (i, &family) in opts.families.iter().enumerate() {
        let seed = opts.seed.wrapping_add((i as u64) << 32);
        let ensembles = sample_separable_at(seed, opts.count, mean_n, family)?;
        let reports: Vec<Result<MomentReport>> = ensembles.par_iter().map(|e| e.moments()).collect();
        for r in reports {
            separable.push((PointSource::SeparableSample(family), r?));
        }
    }
    let optimized: Vec<Result<MomentReport>> = opts
        .optimized_weights
        .par_iter()
        .map(|&w| {
            let min = solve_min_direct(mean_n, Weighting::Weighted(w), default_cutoff(mean_n))?;
            SeparableEnsemble::pure_product(SingleModeState::vacuum(), min.state).moments()
        })
        .collect();
    for (&w, r) in opts.optimized_weights.iter().zip(optimized) {
        separable.push((PointSource::OptimizedProduct(w), r?));
    }

    let criteria = Criteria::default();
    let f = bound_f(mean_n)?;
    let rhs = hyperbola_rhs(mean_n)?;
    let mut violations = 0;
    let (mut min_line_gap, mut min_curve_gap) = (f64::INFINITY, f64::INFINITY);
    for (source, m) in &separable {
        let verdicts = criteria.evaluate_moments(m, &opts.check_weights)?;
        if verdicts.iter().any(|v| v.detected) {
            violations += 1;
        }
        min_line_gap = min_line_gap.min(m.var_n + m.var_diff - f);
        min_curve_gap = min_curve_gap.min((m.var_n + 1.0) * (m.var_diff + 1.0) - rhs);
        points.push(PlanePoint {
            var_n: m.var_n,
            var_diff: m.var_diff,
            mean_n: m.mean_n,
            source: *source,
        });
    }
    let separable_points = separable.len();

    if mean_n.fract() == 0.0 {
        let m = TwoModeState::binomial(mean_n as usize)?.moments();
        points.push(PlanePoint {
            var_n: m.var_n,
            var_diff: m.var_diff,
            mean_n: m.mean_n,
            source: PointSource::EntangledProbe,
        });
    }
    Ok(Fig1Data {
        points,
        violations,
        separable_points,
        min_line_gap,
        min_curve_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_meets_axes_at_rhs_minus_one() {
        let pts = boundary_scan(200.0, &[], 101).unwrap();
        let curve: Vec<_> = pts.iter().filter(|p| p.source == PointSource::BoundaryCurve).collect();
        assert_eq!(curve.len(), 101);
        assert!((curve[0].var_diff - 49.125).abs() < 1e-12);
        assert!((curve[100].var_n - 49.125).abs() < 1e-12);
        assert!(curve[100].var_diff.abs() < 1e-12);
    }

    #[test]
    fn symmetric_tangent_touches_the_diagonal() {
        let n = 200.0;
        let pts = boundary_scan(n, &[0.5], 2).unwrap();
        let line: Vec<_> = pts.iter().filter(|p| p.source == PointSource::TangentLine(0.5)).collect();
        let c = line[0].var_diff * 0.5;
        // line x + y = 2c meets the diagonal at x = c; the curve there is (c+1)^2
        assert!(((c + 1.0).powi(2) - hyperbola_rhs(n).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn simple_line_intercepts() {
        let pts = boundary_scan(200.0, &[], 2).unwrap();
        let f = bound_f(200.0).unwrap();
        let line: Vec<_> = pts.iter().filter(|p| p.source == PointSource::SimpleLine).collect();
        assert_eq!(line.len(), 2);
        assert!((line[0].var_diff - f).abs() < 1e-12 && (line[1].var_n - f).abs() < 1e-12);
    }

    #[test]
    fn small_fig1_has_no_violations() {
        let opts = Fig1Options {
            mean_n: 20.0,
            count: 50,
            optimized_weights: vec![0.3, 0.7],
            resolution: 10,
            ..Fig1Options::default()
        };
        let data = fig1_dataset(&opts).unwrap();
        assert_eq!(data.violations, 0);
        assert_eq!(data.separable_points, 5 * 50 + 2);
        let probe = data.points.iter().find(|p| p.source == PointSource::EntangledProbe).unwrap();
        assert!(probe.var_n.abs() < 1e-12 && probe.var_diff.abs() < 1e-12);
    }
}
