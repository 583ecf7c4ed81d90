use super::gaussian::gaussian_trial;
use super::{
    mean_a_real, mean_real, r_real, stationarity, validate_cutoff, validate_target, MinMethod,
    MinResult, Residuals, Weighting,
};
use crate::error::{Error, Result};
use crate::fock::SingleModeState;
use crate::numeric::find_root;
use nalgebra::{DMatrix, DVector};

const MAX_NEWTON: usize = 200;

/// Maps a vector back onto `{sum c^2 = 1, <N> = target}` by an exponential
/// tilt `c_k e^{beta k}` followed by normalization.
fn retract(c: &[f64], target: f64) -> Option<Vec<f64>> {
    let logs: Vec<Option<f64>> = c
        .iter()
        .map(|x| if *x != 0.0 { Some(x.abs().ln()) } else { None })
        .collect();
    let tilt = |beta: f64| -> Vec<f64> {
        let top = logs
            .iter()
            .enumerate()
            .filter_map(|(k, l)| l.map(|l| l + beta * k as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        let mut out: Vec<f64> = c
            .iter()
            .zip(&logs)
            .enumerate()
            .map(|(k, (x, l))| match l {
                Some(l) => x.signum() * (l + beta * k as f64 - top).exp(),
                None => 0.0,
            })
            .collect();
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.iter_mut().for_each(|x| *x /= norm);
        out
    };
    let excess = |beta: f64| mean_real(&tilt(beta)) - target;
    let mut span = 0.05;
    while excess(-span) > 0.0 || excess(span) < 0.0 {
        span *= 2.0;
        if span > 50.0 {
            return None;
        }
    }
    let beta = find_root(excess, -span, span, 1e-16, 300)?;
    Some(tilt(beta))
}

struct Derivatives {
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

/// Value, gradient and Hessian of `c_N (m2 - m1^2) + c_a (m1 - A^2)` as a
/// function of the raw real vector, with `m1 = c'Kc`, `m2 = c'K^2c`,
/// `A = c'Tc`, `K = diag(k)` and `T` the symmetric part of the lowering
/// operator.
fn derivatives(c: &[f64], cn: f64, ca: f64) -> Derivatives {
    let d = c.len();
    let m1 = mean_real(c);
    let a = mean_a_real(c);
    let kc = DVector::from_fn(d, |k, _| k as f64 * c[k]);
    let tc = DVector::from_fn(d, |k, _| {
        let prev = if k > 0 { (k as f64).sqrt() * c[k - 1] } else { 0.0 };
        let next = if k + 1 < d {
            ((k + 1) as f64).sqrt() * c[k + 1]
        } else {
            0.0
        };
        0.5 * (prev + next)
    });
    let grad = DVector::from_fn(d, |k, _| {
        let kf = k as f64;
        cn * (2.0 * kf * kf * c[k] - 4.0 * m1 * kc[k]) + ca * (2.0 * kc[k] - 4.0 * a * tc[k])
    });
    let mut hess = &kc * kc.transpose() * (-8.0 * cn) + &tc * tc.transpose() * (-8.0 * ca);
    for k in 0..d {
        let kf = k as f64;
        hess[(k, k)] += cn * (2.0 * kf * kf - 4.0 * m1 * kf) + ca * 2.0 * kf;
        if k + 1 < d {
            // T_{k,k+1} = sqrt(k+1)/2
            let t = -4.0 * ca * a * 0.5 * ((k + 1) as f64).sqrt();
            hess[(k, k + 1)] += t;
            hess[(k + 1, k)] += t;
        }
    }
    Derivatives {
        grad,
        hess,
    }
}

/// Constrained minimum by Newton iteration on the Lagrange conditions.
///
/// Starts from the best Gaussian profile, solves the bordered KKT system for
/// the step with least-squares multipliers, retracts onto the constraint
/// set and backtracks until the value does not increase. Weighted and
/// unweighted functionals share the same path; `w = 1` is allowed as the
/// number-variance-only limit.
pub fn solve_min_direct(target_n: f64, weighting: Weighting, cutoff: usize) -> Result<MinResult> {
    validate_target(target_n)?;
    weighting.validate(true)?;
    validate_cutoff(target_n, cutoff)?;
    let (cn, ca) = weighting.coefficients();
    let trial = gaussian_trial(target_n, weighting, cutoff)?;
    let mut c = retract(&trial.amplitudes, target_n).ok_or_else(|| Error::Convergence {
        method: "direct",
        detail: "initial profile cannot meet the constraint".into(),
    })?;
    let d = c.len();
    let mut value = r_real(&c, cn, ca);
    let mut converged = false;
    let mut last_step = f64::NAN;

    for _ in 0..MAX_NEWTON {
        let der = derivatives(&c, cn, ca);
        let cv = DVector::from_column_slice(&c);
        let kc = DVector::from_fn(d, |k, _| k as f64 * c[k]);
        // least-squares multipliers: grad ~ 2 l1 Kc + 2 l2 c
        let basis = DMatrix::from_columns(&[&kc * 2.0, &cv * 2.0]);
        let gram = basis.transpose() * &basis;
        let rhs = basis.transpose() * &der.grad;
        let lambda = gram.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(2));
        let reduced = &der.grad - &basis * &lambda;
        let scale = 1.0 + der.grad.amax();
        if reduced.amax() <= 1e-13 * scale {
            converged = true;
            break;
        }

        let mut kkt = DMatrix::<f64>::zeros(d + 2, d + 2);
        kkt.view_mut((0, 0), (d, d)).copy_from(&der.hess);
        for k in 0..d {
            kkt[(k, k)] -= 2.0 * lambda[0] * k as f64 + 2.0 * lambda[1];
            kkt[(k, d)] = basis[(k, 0)];
            kkt[(k, d + 1)] = basis[(k, 1)];
            kkt[(d, k)] = basis[(k, 0)];
            kkt[(d + 1, k)] = basis[(k, 1)];
        }
        let mut b = DVector::<f64>::zeros(d + 2);
        b.rows_mut(0, d).copy_from(&(-&reduced));
        let mut step = kkt
            .lu()
            .solve(&b)
            .map(|x| x.rows(0, d).into_owned())
            .unwrap_or_else(|| -&reduced);
        if step.dot(&reduced) >= 0.0 {
            step = -&reduced / scale;
        }

        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial_c: Vec<f64> = c.iter().zip(step.iter()).map(|(x, p)| x + s * p).collect();
            if let Some(next) = retract(&trial_c, target_n) {
                let v = r_real(&next, cn, ca);
                if v <= value + 1e-15 * value.abs().max(1.0) {
                    last_step = s * step.amax();
                    let improvement = value - v;
                    c = next;
                    value = v;
                    accepted = true;
                    if improvement.abs() <= 1e-15 * value.abs().max(1.0) && last_step < 1e-9 {
                        converged = true;
                    }
                    break;
                }
            }
            s *= 0.5;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            method: "direct",
            detail: format!(
                "no convergence in {MAX_NEWTON} Newton steps for <N> = {target_n}, last step {last_step:.3e}"
            ),
        });
    }

    // amplitudes of the minimiser can be taken non-negative
    if c.iter().sum::<f64>() < 0.0 {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    let (params, stationarity_residual) = stationarity(&c, cn, ca);
    let residuals = Residuals {
        constraint: (mean_real(&c) - target_n).abs(),
        norm: (c.iter().map(|x| x * x).sum::<f64>() - 1.0).abs(),
        self_consistency: 0.0,
        stationarity: stationarity_residual,
    };
    if residuals.constraint > crate::tolerance::CONSTRAINT {
        return Err(Error::Convergence {
            method: "direct",
            detail: format!("constraint residual {:.3e}", residuals.constraint),
        });
    }
    Ok(MinResult {
        state: SingleModeState::from_real(&c)?,
        value: r_real(&c, cn, ca),
        target_n,
        weighting,
        residuals,
        method: MinMethod::Direct,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retraction_hits_constraints() {
        let c = [0.5, 0.4, 0.3, 0.2, 0.1, 0.05];
        let r = retract(&c, 1.7).unwrap();
        assert!((mean_real(&r) - 1.7).abs() < 1e-12);
        assert!((r.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = [0.4, 0.6, -0.3, 0.5, 0.2, 0.1];
        for (cn, ca) in [(1.0, 1.0), (0.3, 0.7)] {
            let der = derivatives(&c, cn, ca);
            let h = 1e-6;
            for k in 0..c.len() {
                let mut up = c;
                let mut dn = c;
                up[k] += h;
                dn[k] -= h;
                // raw (non-normalized) functional used by the derivatives
                let f = |v: &[f64]| {
                    let m1 = mean_real(v);
                    let m2: f64 = v.iter().enumerate().map(|(i, x)| (i * i) as f64 * x * x).sum();
                    let a = mean_a_real(v);
                    cn * (m2 - m1 * m1) + ca * (m1 - a * a)
                };
                let fd = (f(&up) - f(&dn)) / (2.0 * h);
                assert!((fd - der.grad[k]).abs() < 1e-6, "k={k}: {fd} vs {}", der.grad[k]);
                let mut up_g = derivatives(&up, cn, ca).grad;
                up_g -= derivatives(&dn, cn, ca).grad;
                up_g /= 2.0 * h;
                for j in 0..c.len() {
                    assert!((up_g[j] - der.hess[(j, k)]).abs() < 1e-5);
                }
            }
        }
    }
}
