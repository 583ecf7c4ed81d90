use super::{
    mean_a_real, mean_real, r_real, stationarity, validate_cutoff,
    validate_target, MinMethod, MinResult, Residuals, Weighting,
};
use crate::error::{Error, Result};
use crate::fock::SingleModeState;
use crate::numeric::{bisect_predicate, find_root, scan_then_refine};
use serde::Serialize;

/// Parameters of the stationarity recurrence
/// `c_{n+1} = (n^2 + mu1 n + mu2) / (A sqrt(n+1)) c_n - sqrt(n/(n+1)) c_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceParams {
    /// Self-consistent `<a>`.
    pub a: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Highest number state generated.
    pub cutoff: usize,
}

/// A generated sequence is accepted once it has decayed below this fraction
/// of its peak; the regrowth that follows is the unstable dominant solution.
const TAIL_FLOOR: f64 = 1e-7;
const RESCALE_AT: f64 = 1e150;

fn step_coefficient(n: usize, p: &RecurrenceParams) -> f64 {
    let nf = n as f64;
    (nf * nf + p.mu1 * nf + p.mu2) / (p.a * (nf + 1.0).sqrt())
}

/// Raw sequence `c_0 = 1, c_1, ..., c_len-1`, rescaled on the fly so it never
/// overflows.
fn generate_raw(p: &RecurrenceParams, len: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(len);
    c.push(1.0);
    if len > 1 {
        c.push(step_coefficient(0, p));
    }
    for n in 1..len.saturating_sub(1) {
        let next = step_coefficient(n, p) * c[n] - (n as f64 / (n as f64 + 1.0)).sqrt() * c[n - 1];
        c.push(next);
        if next.abs() > RESCALE_AT {
            c.iter_mut().for_each(|x| *x /= RESCALE_AT);
        }
    }
    c
}

/// Number of sign changes in `c_0 ..= c_{cutoff+1}`. The sequence is a
/// Sturm sequence of the truncated tridiagonal operator, so this counts its
/// eigenvalues below `-mu2`.
fn sign_changes(p: &RecurrenceParams) -> usize {
    let mut prev2 = 0.0f64;
    let mut prev = 1.0f64;
    let mut changes = 0;
    for n in 0..=p.cutoff {
        let next = if n == 0 {
            step_coefficient(0, p)
        } else {
            step_coefficient(n, p) * prev - (n as f64 / (n as f64 + 1.0)).sqrt() * prev2
        };
        if next == 0.0 {
            // exact zero: treat as a change, the eigenvalue sits here
            changes += 1;
            prev2 = prev;
            prev = -prev * f64::EPSILON;
            continue;
        }
        if next.signum() != prev.signum() {
            changes += 1;
        }
        prev2 = prev;
        prev = next;
        if prev.abs() > RESCALE_AT {
            prev /= RESCALE_AT;
            prev2 /= RESCALE_AT;
        }
    }
    changes
}

/// Cuts the dominant-solution regrowth after the post-peak minimum.
///
/// The running peak is tracked from `c_0`; once the sequence has fallen below
/// `TAIL_FLOOR` of it, everything past the next local minimum is zeroed.
fn truncate_tail(c: &mut [f64]) -> Result<()> {
    let mut peak = 0.0f64;
    let mut decayed = None;
    for (i, x) in c.iter().enumerate() {
        let v = x.abs();
        if !v.is_finite() {
            return Err(Error::NonNormalizable { index: i });
        }
        peak = peak.max(v);
        if v <= TAIL_FLOOR * peak {
            decayed = Some(i);
            break;
        }
    }
    let Some(mut floor) = decayed else {
        // never decayed: accept only a sequence that is falling at the cutoff
        let last = c.len() - 1;
        let falling = last > 0 && c[last].abs() < c[last - 1].abs() && c[last].abs() < peak;
        if falling && c[last].abs() <= 1e-3 * peak {
            return Ok(());
        }
        let mut start = last;
        while start > 0 && c[start - 1].abs() < c[start].abs() {
            start -= 1;
        }
        return Err(Error::NonNormalizable { index: start });
    };
    while floor + 1 < c.len() && c[floor + 1].abs() < c[floor].abs() {
        floor += 1;
    }
    c[floor + 1..].iter_mut().for_each(|x| *x = 0.0);
    Ok(())
}

/// Generates the normalized state of the recurrence from `c_0 = 1`.
///
/// The sequence is accepted when it peaks and decays below `1e-7` of the
/// peak before the cutoff; the unstable regrowth past the post-peak minimum
/// is discarded. A sequence that keeps growing, or turns around before
/// decaying, is not normalizable.
pub fn recurrence_generate(p: &RecurrenceParams) -> Result<SingleModeState> {
    let c = generate_checked(p)?;
    SingleModeState::from_real(&c)
}

fn generate_checked(p: &RecurrenceParams) -> Result<Vec<f64>> {
    if !(p.a > 0.0) || !p.a.is_finite() {
        return Err(Error::domain("A", p.a, "(0, inf)"));
    }
    if p.cutoff < 10 {
        return Err(Error::Validation(format!("cutoff {} is below 10", p.cutoff)));
    }
    crate::fock::check_cutoff(p.cutoff)?;
    let mut c = generate_raw(p, p.cutoff + 1);
    if c.iter().any(|x| !x.is_finite()) {
        let index = c.iter().position(|x| !x.is_finite()).unwrap_or(0);
        return Err(Error::NonNormalizable { index });
    }
    truncate_tail(&mut c)?;
    normalize_real(&mut c);
    Ok(c)
}

/// Scales to unit norm without overflowing on large raw amplitudes.
fn normalize_real(c: &mut [f64]) {
    let top = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    c.iter_mut().for_each(|x| *x /= top);
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    c.iter_mut().for_each(|x| *x /= norm);
}

/// Ground state of the stationarity operator for fixed `(A, mu1)`: `mu2` is
/// bisected to the edge where the Sturm count first becomes non-zero.
fn ground_state(a: f64, mu1: f64, cutoff: usize) -> Result<(Vec<f64>, f64)> {
    // Gershgorin bounds on the lowest eigenvalue lambda = -mu2.
    let diag = |n: usize| {
        let nf = n as f64;
        nf * nf + mu1 * nf
    };
    let mut lam_hi = f64::INFINITY;
    let mut lam_lo = f64::INFINITY;
    for n in 0..=cutoff {
        let nf = n as f64;
        lam_hi = lam_hi.min(diag(n));
        lam_lo = lam_lo.min(diag(n) - a * (nf.sqrt() + (nf + 1.0).sqrt()));
    }
    let params = |mu2: f64| RecurrenceParams {
        a,
        mu1,
        mu2,
        cutoff,
    };
    // mu2 large: below the spectrum, no sign change.
    let (mu2_lo, mu2_hi) = bisect_predicate(
        |mu2| sign_changes(&params(mu2)) == 0,
        -lam_hi - 1.0,
        -lam_lo + 1.0,
        200,
    );
    let mu2 = 0.5 * (mu2_lo + mu2_hi);
    let c = two_sided(&params(mu2))?;
    Ok((c, mu2))
}

/// Eigenvector at an eigenvalue located by the Sturm count. The forward
/// recurrence is stable only while the amplitudes rise, so it runs up to
/// the first maximum; the decaying side comes from the backward recurrence
/// started at `c_{cutoff+1} = 0`, scaled to match at that maximum.
fn two_sided(p: &RecurrenceParams) -> Result<Vec<f64>> {
    let len = p.cutoff + 1;
    let fwd = generate_raw(p, len);
    let mut m = 0;
    while m + 1 < len && fwd[m + 1].abs() >= fwd[m].abs() {
        m += 1;
    }
    let mut c = vec![0.0; len];
    c[len - 1] = 1.0;
    let mut next = 0.0;
    for n in (m + 1..len).rev() {
        let nf = n as f64;
        let prev = (step_coefficient(n, p) * (nf + 1.0).sqrt() * c[n] - (nf + 1.0).sqrt() * next) / nf.sqrt();
        next = c[n];
        c[n - 1] = prev;
        if prev.abs() > RESCALE_AT {
            c[n - 1..].iter_mut().for_each(|x| *x /= RESCALE_AT);
            next /= RESCALE_AT;
        }
    }
    if !(c[m].abs() > 0.0) || !c[m].is_finite() || !fwd[m].is_finite() {
        return Err(Error::NonNormalizable { index: m });
    }
    let scale = fwd[m] / c[m];
    c[m..].iter_mut().for_each(|x| *x *= scale);
    c[..m].copy_from_slice(&fwd[..m]);
    if c.iter().any(|x| *x < 0.0) {
        return Err(Error::NonNormalizable { index: m });
    }
    normalize_real(&mut c);
    Ok(c)
}

/// Constrained ground state at fixed `A`: `mu1` root-found so `<N> = target`.
struct Constrained {
    c: Vec<f64>,
    mu1: f64,
    mu2: f64,
}

fn constrained_state(a: f64, target: f64, cutoff: usize) -> Result<Constrained> {
    let mean_at = |mu1: f64| ground_state(a, mu1, cutoff).map(|(c, _)| mean_real(&c));
    let center = -2.0 * target;
    let mut span = 4.0 * target.sqrt() + 8.0;
    let (mut lo, mut hi);
    loop {
        lo = center - span;
        hi = center + span;
        let m_lo = mean_at(lo).unwrap_or(f64::INFINITY);
        let m_hi = mean_at(hi).unwrap_or(f64::NEG_INFINITY);
        if m_lo > target && m_hi < target {
            break;
        }
        span *= 2.0;
        if span > 1e6 {
            return Err(Error::Convergence {
                method: "recurrence",
                detail: format!("no mu1 bracket for <N> = {target} at A = {a}"),
            });
        }
    }
    let mu1 = find_root(
        |mu1| mean_at(mu1).map(|m| m - target).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-13 * (1.0 + center.abs()),
        300,
    )
    .ok_or_else(|| Error::Convergence {
        method: "recurrence",
        detail: "mu1 root lost its bracket".into(),
    })?;
    let (c, mu2) = ground_state(a, mu1, cutoff)?;
    Ok(Constrained { c, mu1, mu2 })
}

/// Minimum of `(Delta N_A)^2 + (Delta a)^2` at `<N_A> = target_n` via the
/// stationarity recurrence.
///
/// For fixed `A` the recurrence ground state with `<N> = target_n` minimises
/// `<D> - 2 A <a> + A^2`, whose minimum over `A` equals the constrained
/// minimum of the functional and satisfies `A = <a>`. `A` is located by a scan
/// plus golden-section refinement, then polished as a root of `A - <a>`.
pub fn solve_min_recurrence(target_n: f64, cutoff: usize) -> Result<MinResult> {
    validate_target(target_n)?;
    validate_cutoff(target_n, cutoff)?;
    let envelope = |a: f64| -> f64 {
        match constrained_state(a, target_n, cutoff) {
            // near-Fock ground states at small A cannot hit a fractional target
            Ok(s) if (mean_real(&s.c) - target_n).abs() > crate::tolerance::CONSTRAINT => f64::INFINITY,
            Ok(s) => {
                let d: f64 = s
                    .c
                    .iter()
                    .enumerate()
                    .map(|(k, x)| (k * k) as f64 * x * x)
                    .sum();
                d - 2.0 * a * mean_a_real(&s.c) + a * a
            }
            Err(_) => f64::INFINITY,
        }
    };
    let a_max = target_n.sqrt() + 0.5;
    let a_min = 1e-3 * a_max;
    let (a_guess, _) = scan_then_refine(envelope, a_min, a_max, 24, 1e-7 * a_max);
    let consistency = |a: f64| -> f64 {
        constrained_state(a, target_n, cutoff)
            .map(|s| a - mean_a_real(&s.c))
            .unwrap_or(f64::NAN)
    };
    let width = 0.05 * a_max;
    let a_star = find_root(
        consistency,
        (a_guess - width).max(0.5 * a_min),
        (a_guess + width).min(a_max + width),
        1e-14 * a_max,
        200,
    )
    .unwrap_or(a_guess);

    let s = constrained_state(a_star, target_n, cutoff)?;
    let value = r_real(&s.c, 1.0, 1.0);
    let mean = mean_real(&s.c);
    let self_consistency = (a_star - mean_a_real(&s.c)).abs();
    let (_, stationarity_residual) = stationarity(&s.c, 1.0, 1.0);
    let residuals = Residuals {
        constraint: (mean - target_n).abs(),
        norm: (s.c.iter().map(|x| x * x).sum::<f64>() - 1.0).abs(),
        self_consistency,
        stationarity: stationarity_residual,
    };
    if residuals.constraint > crate::tolerance::CONSTRAINT || self_consistency > 1e-8 {
        return Err(Error::Convergence {
            method: "recurrence",
            detail: format!(
                "target {target_n}: constraint residual {:.3e}, self-consistency {:.3e}",
                residuals.constraint, self_consistency
            ),
        });
    }
    Ok(MinResult {
        state: SingleModeState::from_real(&s.c)?,
        value,
        target_n,
        weighting: Weighting::Equal,
        residuals,
        method: MinMethod::Recurrence,
        params: RecurrenceParams {
            a: a_star,
            mu1: s.mu1,
            mu2: s.mu2,
            cutoff,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_vanishes_without_mu2() {
        let p = RecurrenceParams {
            a: 1.3,
            mu1: 0.7,
            mu2: 0.0,
            cutoff: 12,
        };
        let c = generate_raw(&p, 3);
        assert_eq!(c[0], 1.0);
        assert_eq!(c[1], 0.0);
    }

    #[test]
    fn far_from_stationarity_diverges() {
        let p = RecurrenceParams {
            a: 0.1,
            mu1: 1.0,
            mu2: 1.0,
            cutoff: 60,
        };
        assert!(matches!(
            recurrence_generate(&p),
            Err(Error::NonNormalizable { .. })
        ));
    }

    #[test]
    fn sturm_count_matches_dense_spectrum() {
        use nalgebra::DMatrix;
        let (a, mu1, cutoff) = (1.7, -6.0, 20);
        let dim = cutoff + 1;
        let t = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                (i * i) as f64 + mu1 * i as f64
            } else if j == i + 1 {
                -a * (j as f64).sqrt()
            } else if i == j + 1 {
                -a * (i as f64).sqrt()
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigenvalues();
        for lam in [-20.0, -8.5, -3.0, 0.0, 4.0, 30.0] {
            let below = eig.iter().filter(|&&e| e < lam).count();
            let p = RecurrenceParams {
                a,
                mu1,
                mu2: -lam,
                cutoff,
            };
            assert_eq!(sign_changes(&p), below, "lambda = {lam}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(solve_min_recurrence(0.0, 60).is_err());
        assert!(solve_min_recurrence(50.0, 20).is_err());
    }
}
