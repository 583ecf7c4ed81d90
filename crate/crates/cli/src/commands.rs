use crate::args::{
    parse_grid, BoundsArgs, EvaluateArgs, Fig1Args, Fig2Args, Format, MethodArg, MinimizeArgs, SampleArgs, VerifyArgs,
};
use crate::output::{destination, emit, extension, render};
use crate::CliError;
use rayon::prelude::*;
use std::path::Path;
use twomode_core::bounds::{bound_f, bound_f_tilde, bound_fw, bound_l, bound_lw, hyperbola_rhs};
use twomode_core::criteria::Criteria;
use twomode_core::minimizer::{default_cutoff, solve_min_direct, solve_min_recurrence, MinResult};
use twomode_core::sampler::{fig1_dataset, fig2_dataset, sample_separable, Fig1Options, Fig2Method};
use twomode_core::table::{Cell, Table};
use twomode_core::tolerance::MAX_CUTOFF;
use twomode_core::verify::{self, Mode, CHECKS};
use twomode_core::{statefile, Family, MinMethod, Weighting};

type Outcome = Result<(), CliError>;

fn check_weights(ws: &[f64]) -> Result<(), CliError> {
    match ws.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
        Some(w) => Err(CliError::Usage(format!("--w {w} is outside (0, 1)"))),
        None => Ok(()),
    }
}

fn grid(specs: &[String]) -> Result<Vec<f64>, CliError> {
    parse_grid(specs).map_err(|e| CliError::Usage(format!("--n: {e}")))
}

fn write(table: &Table, format: Format, out: Option<&Path>, fallback: &str) -> Outcome {
    let name = format!("{fallback}.{}", extension(format));
    let dest = destination(out, Some(&name));
    emit(dest.as_deref(), &render(table, format)).map_err(|e| CliError::io(dest.as_deref(), e))
}

/// Writes to stdout unless `--out` is given; the output directory only
/// resolves relative paths here.
fn write_plain(table: &Table, format: Format, out: Option<&Path>) -> Outcome {
    let dest = destination(out, None);
    emit(dest.as_deref(), &render(table, format)).map_err(|e| CliError::io(dest.as_deref(), e))
}

pub fn evaluate(a: &EvaluateArgs, format: Format) -> Outcome {
    check_weights(&a.w)?;
    if !(a.tolerance >= 0.0 && a.tolerance.is_finite()) {
        return Err(CliError::Usage(format!("--tolerance {} must be finite and non-negative", a.tolerance)));
    }
    let text = std::fs::read_to_string(&a.state).map_err(|e| CliError::io(Some(&a.state), e))?;
    let state = statefile::StateFile::parse(&text)?.build()?;
    let verdicts = Criteria::with_tolerance(a.tolerance).evaluate_all(state.subject(), &a.w)?;
    let mut t = Table::new(&["criterion", "w", "lhs", "rhs", "margin", "detected"]);
    for v in verdicts {
        t.push(vec![
            v.criterion.name().into(),
            v.criterion.weight().into(),
            v.lhs.into(),
            v.rhs.into(),
            v.margin.into(),
            v.detected.into(),
        ]);
    }
    write_plain(&t, format, a.out.out.as_deref())
}

pub fn bounds(a: &BoundsArgs, format: Format) -> Outcome {
    check_weights(&a.w)?;
    let ns = grid(&a.n)?;
    if let Some(n) = ns.iter().find(|n| !(**n >= 0.0 && n.is_finite())) {
        return Err(CliError::Usage(format!("--n {n} must be finite and non-negative")));
    }
    let mut t = Table::new(&["N", "w", "L", "f", "L_w", "f_w", "f_tilde_w", "hyperbola_rhs"]);
    for &n in &ns {
        for &w in &a.w {
            t.push(vec![
                n.into(),
                w.into(),
                bound_l(n)?.into(),
                bound_f(n)?.into(),
                bound_lw(n, w)?.into(),
                bound_fw(n, w)?.into(),
                bound_f_tilde(n, w)?.into(),
                hyperbola_rhs(n)?.into(),
            ]);
        }
    }
    write_plain(&t, format, a.out.out.as_deref())
}

pub fn minimize(a: &MinimizeArgs, format: Format) -> Outcome {
    let targets = grid(&a.n)?;
    if let Some(n) = targets.iter().find(|n| !(**n > 0.0 && n.is_finite())) {
        return Err(CliError::Usage(format!("--n {n} must be positive")));
    }
    let weighting = match a.w {
        Some(w) => {
            check_weights(&[w])?;
            if a.method != MethodArg::Direct {
                return Err(CliError::Usage(
                    "--w requires --method direct; the recurrence route handles the unweighted functional".into(),
                ));
            }
            Weighting::Weighted(w)
        }
        None => Weighting::Equal,
    };
    if let Some(c) = a.cutoff {
        if c > MAX_CUTOFF {
            return Err(CliError::Usage(format!("--cutoff {c} exceeds the maximum {MAX_CUTOFF}")));
        }
    }
    let methods: &[MinMethod] = match a.method {
        MethodArg::Recurrence => &[MinMethod::Recurrence],
        MethodArg::Direct => &[MinMethod::Direct],
        MethodArg::Both => &[MinMethod::Recurrence, MinMethod::Direct],
    };
    let jobs: Vec<(f64, MinMethod)> =
        targets.iter().flat_map(|&n| methods.iter().map(move |&m| (n, m))).collect();
    let results: Vec<MinResult> = jobs
        .par_iter()
        .map(|&(n, m)| {
            let cutoff = a.cutoff.unwrap_or_else(|| default_cutoff(n));
            match m {
                MinMethod::Recurrence => solve_min_recurrence(n, cutoff),
                MinMethod::Direct => solve_min_direct(n, weighting, cutoff),
            }
        })
        .collect::<Result<_, _>>()?;

    let mut t = Table::new(&[
        "target_n",
        "method",
        "w",
        "value",
        "bound",
        "gap",
        "constraint_residual",
        "norm_residual",
        "self_consistency",
        "stationarity",
        "cutoff",
    ]);
    for r in &results {
        let w = match r.weighting {
            Weighting::Equal => None,
            Weighting::Weighted(w) => Some(w),
        };
        t.push(vec![
            r.target_n.into(),
            r.method.name().into(),
            w.into(),
            r.value.into(),
            r.bound().into(),
            r.gap().into(),
            r.residuals.constraint.into(),
            r.residuals.norm.into(),
            r.residuals.self_consistency.into(),
            r.residuals.stationarity.into(),
            r.state.cutoff().into(),
        ]);
    }
    if let Some(path) = &a.dump_amplitudes {
        let mut dump = Table::new(&["target_n", "method", "n", "amplitude"]);
        for r in &results {
            for (k, c) in r.real_amplitudes().into_iter().enumerate() {
                dump.push(vec![r.target_n.into(), r.method.name().into(), k.into(), c.into()]);
            }
        }
        write_plain(&dump, Format::Csv, Some(path))?;
    }
    write_plain(&t, format, a.out.out.as_deref())
}

pub fn sample(a: &SampleArgs, format: Format) -> Outcome {
    let family = Family::parse(&a.family).ok_or_else(|| {
        let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
        CliError::Usage(format!("--family `{}` is not one of {}", a.family, names.join(", ")))
    })?;
    if !(a.n_max >= 0.0 && a.n_max.is_finite()) {
        return Err(CliError::Usage(format!("--n-max {} must be finite and non-negative", a.n_max)));
    }
    let ensembles = sample_separable(a.seed, a.count, a.n_max, family)?;
    let ws: Vec<f64> = (1..10).map(|k| k as f64 * 0.1).collect();
    let criteria = Criteria::default();
    let rows: Vec<(twomode_core::MomentReport, Vec<twomode_core::CriterionVerdict>)> = ensembles
        .par_iter()
        .map(|e| {
            let m = e.moments()?;
            Ok((m, criteria.evaluate_moments(&m, &ws)?))
        })
        .collect::<twomode_core::Result<_>>()?;

    let mut t = Table::new(&[
        "index",
        "family",
        "components",
        "mean_n",
        "var_n",
        "var_diff",
        "counting_diff",
        "epr_lhs",
        "max_margin",
        "detected",
    ]);
    let mut detections = 0;
    for (i, (e, (m, verdicts))) in ensembles.iter().zip(&rows).enumerate() {
        let detected = verdicts.iter().any(|v| v.detected);
        detections += detected as usize;
        let max_margin = verdicts.iter().map(|v| v.margin).fold(f64::NEG_INFINITY, f64::max);
        t.push(vec![
            i.into(),
            family.name().into(),
            e.components().len().into(),
            m.mean_n.into(),
            m.var_n.into(),
            m.var_diff.into(),
            m.counting_diff.into(),
            (m.epr_x + m.epr_p).into(),
            max_margin.into(),
            detected.into(),
        ]);
    }
    write_plain(&t, format, a.out.out.as_deref())?;
    if detections > 0 {
        return Err(CliError::Verification(format!(
            "{detections} separable samples were flagged as entangled"
        )));
    }
    Ok(())
}

pub fn fig1(a: &Fig1Args, format: Format) -> Outcome {
    if !(a.n > 0.0 && a.n.is_finite()) {
        return Err(CliError::Usage(format!("--n {} must be positive", a.n)));
    }
    check_weights(&a.w)?;
    if a.resolution < 2 {
        return Err(CliError::Usage("--resolution must be at least 2".into()));
    }
    let opts = Fig1Options {
        mean_n: a.n,
        seed: a.seed,
        count: a.count,
        line_weights: a.w.clone(),
        resolution: a.resolution,
        ..Fig1Options::default()
    };
    let data = fig1_dataset(&opts)?;
    let mut t = Table::new(&["source", "w", "mean_n", "var_n", "var_diff", "separable"]);
    for p in &data.points {
        t.push(vec![
            p.source.name().into(),
            p.source.weight().into(),
            p.mean_n.into(),
            p.var_n.into(),
            p.var_diff.into(),
            p.source.is_separable().into(),
        ]);
    }
    write(&t, format, a.out.out.as_deref(), "fig1")?;
    eprintln!(
        "fig1: {} points, {} separable, {} violations, min line gap {:.6e}, min curve gap {:.6e}",
        data.points.len(),
        data.separable_points,
        data.violations,
        data.min_line_gap,
        data.min_curve_gap
    );
    if data.violations > 0 {
        return Err(CliError::Verification(format!(
            "{} separable points violate a separability bound",
            data.violations
        )));
    }
    Ok(())
}

pub fn fig2(a: &Fig2Args, format: Format) -> Outcome {
    let targets = grid(&a.n)?;
    if let Some(n) = targets.iter().find(|n| !(**n > 0.0 && **n <= 400.0)) {
        return Err(CliError::Usage(format!("--n {n} is outside (0, 400]")));
    }
    let method = match a.method {
        MethodArg::Recurrence => Fig2Method::Recurrence,
        MethodArg::Direct => Fig2Method::Direct,
        MethodArg::Both => Fig2Method::Both,
    };
    let data = fig2_dataset(&targets, method)?;
    let mut t = Table::new(&[
        "target_n",
        "method",
        "value",
        "bound",
        "gap",
        "gaussian_trial",
        "constraint_residual",
        "stationarity",
        "error",
    ]);
    let mut failed = 0;
    let mut negative = 0;
    for r in &data.rows {
        failed += r.error.is_some() as usize;
        negative += r.gap().is_some_and(|g| g < -twomode_core::tolerance::DETECTION) as usize;
        t.push(vec![
            r.target_n.into(),
            r.method.name().into(),
            r.value.into(),
            r.bound.into(),
            r.gap().into(),
            r.gaussian_trial.into(),
            r.residuals.map(|x| x.constraint).into(),
            r.residuals.map(|x| x.stationarity).into(),
            r.error.clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    write(&t, format, a.out.out.as_deref(), "fig2")?;

    let inset = &data.inset;
    let mut it = Table::new(&["n", "amplitude", "gaussian_fit"]);
    for (k, &c) in inset.amplitudes.iter().enumerate() {
        it.push(vec![k.into(), c.into(), inset.fit.eval(k as f64).into()]);
    }
    let inset_name = format!("fig2_inset.{}", extension(format));
    if let Some(dest) = destination(a.inset_out.as_deref(), Some(&inset_name)) {
        emit(Some(&dest), &render(&it, format)).map_err(|e| CliError::io(Some(&dest), e))?;
    }
    eprintln!(
        "fig2: {} rows, {} failed, {} negative gaps; inset at <N> = {} fits a Gaussian with R^2 = {:.6}",
        data.rows.len(),
        failed,
        negative,
        inset.target_n,
        inset.fit.r_squared
    );
    if failed > 0 {
        return Err(CliError::Convergence(format!("{failed} minimisations did not converge")));
    }
    if negative > 0 {
        return Err(CliError::Verification(format!("{negative} minima fall below the analytic bound")));
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    if let Some(bad) = a.only.iter().find(|o| !CHECKS.iter().any(|(name, _)| name == o)) {
        let names: Vec<&str> = CHECKS.iter().map(|(n, _)| *n).collect();
        return Err(CliError::Usage(format!("--only `{bad}` is not one of {}", names.join(", "))));
    }
    let mode = if a.quick { Mode::Quick } else { Mode::Full };
    let outcomes = verify::run_suite_filtered(mode, |name| a.only.is_empty() || a.only.iter().any(|o| o == name));
    let mut failed = 0;
    for o in &outcomes {
        failed += !o.passed as usize;
        println!(
            "{} {} ({:.1} s): {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.seconds,
            o.detail
        );
    }
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} checks failed")));
    }
    Ok(())
}
