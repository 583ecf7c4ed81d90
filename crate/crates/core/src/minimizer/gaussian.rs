use super::{mean_real, r_real, validate_target, Weighting};
use crate::error::{Error, Result};
use crate::fock::SingleModeState;
use crate::numeric::{find_root, scan_then_refine};

/// Best member of the Gaussian profile family
/// `c_n ~ exp(-(n - center)^2 / (4 width^2))` at the target `<N>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTrial {
    pub value: f64,
    pub center: f64,
    pub width: f64,
    pub amplitudes: Vec<f64>,
}

fn profile(center: f64, width: f64, cutoff: usize) -> Vec<f64> {
    let inv = 1.0 / (4.0 * width * width);
    let logs: Vec<f64> = (0..=cutoff)
        .map(|n| -(n as f64 - center).powi(2) * inv)
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut c: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    c.iter_mut().for_each(|x| *x /= norm);
    c
}

/// Center placing `<N>` on target for a given width.
fn centered(target: f64, width: f64, cutoff: usize) -> Option<(f64, Vec<f64>)> {
    let mean_at = |center: f64| mean_real(&profile(center, width, cutoff)) - target;
    let mut lo = target - 4.0 * width * width - 10.0;
    while mean_at(lo) > 0.0 {
        lo = 2.0 * lo - 10.0;
        if lo < -1e9 {
            return None;
        }
    }
    let hi = target + 10.0;
    if mean_at(hi) < 0.0 {
        return None;
    }
    let center = find_root(mean_at, lo, hi, 1e-13 * (1.0 + target), 300)?;
    Some((center, profile(center, width, cutoff)))
}

/// Minimises the functional over the Gaussian family at `<N_A> = target_n`.
/// The result is an upper bound on the constrained minimum.
pub fn gaussian_trial(target_n: f64, weighting: Weighting, cutoff: usize) -> Result<GaussianTrial> {
    validate_target(target_n)?;
    weighting.validate(true)?;
    crate::fock::check_cutoff(cutoff)?;
    let (cn, ca) = weighting.coefficients();
    let objective = |ln_width: f64| -> f64 {
        centered(target_n, ln_width.exp(), cutoff)
            .map(|(_, c)| r_real(&c, cn, ca))
            .unwrap_or(f64::INFINITY)
    };
    let lo = 0.08f64.ln();
    let hi = (2.0 * target_n.sqrt() + 2.0).ln();
    let (ln_width, value) = scan_then_refine(objective, lo, hi, 40, 1e-9);
    let width = ln_width.exp();
    let (center, amplitudes) = centered(target_n, width, cutoff).ok_or_else(|| Error::Convergence {
        method: "gaussian trial",
        detail: format!("cannot center a profile of width {width} at <N> = {target_n}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Convergence {
            method: "gaussian trial",
            detail: format!("no admissible width for <N> = {target_n}"),
        });
    }
    Ok(GaussianTrial {
        value: r_real(&amplitudes, cn, ca),
        center,
        width,
        amplitudes,
    })
}

/// Value of [`gaussian_trial`] with the default cutoff.
pub fn gaussian_trial_bound(target_n: f64, weighting: Weighting) -> Result<f64> {
    gaussian_trial(target_n, weighting, super::default_cutoff(target_n)).map(|g| g.value)
}

/// Least-squares Gaussian fit of an amplitude profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    /// Coefficient of determination of the fitted amplitudes.
    pub r_squared: f64,
}

impl GaussianFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.amplitude * (-(n - self.center).powi(2) / (4.0 * self.width * self.width)).exp()
    }
}

/// Fits `ln c_n` by a quadratic over the amplitudes above `1e-4` of the
/// peak and scores the fit on all amplitudes.
pub fn gaussian_fit(state: &SingleModeState) -> Result<GaussianFit> {
    let c: Vec<f64> = state.amplitudes().iter().map(|z| z.norm()).collect();
    let peak = c.iter().copied().fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 1e-4 * peak)
        .map(|(n, &x)| (n as f64, x.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Validation(
            "need at least three significant amplitudes for a Gaussian fit".into(),
        ));
    }
    // normal equations for ln c = p0 + p1 n + p2 n^2, with n centred for conditioning
    let shift = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut atb = nalgebra::Vector3::<f64>::zeros();
    for &(n, y) in &pts {
        let x = n - shift;
        let row = nalgebra::Vector3::new(1.0, x, x * x);
        ata += row * row.transpose();
        atb += row * y;
    }
    let p = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::Validation("singular Gaussian fit".into()))?;
    if !(p[2] < 0.0) {
        return Err(Error::Validation("amplitude profile is not peaked".into()));
    }
    let width = (-1.0 / (4.0 * p[2])).sqrt();
    let center = shift - p[1] / (2.0 * p[2]);
    let amplitude = (p[0] - p[1] * p[1] / (4.0 * p[2])).exp();
    let fit = GaussianFit {
        amplitude,
        center,
        width,
        r_squared: 0.0,
    };
    let mean = c.iter().sum::<f64>() / c.len() as f64;
    let ss_tot: f64 = c.iter().map(|x| (x - mean).powi(2)).sum();
    let ss_res: f64 = c
        .iter()
        .enumerate()
        .map(|(n, x)| (x - fit.eval(n as f64)).powi(2))
        .sum();
    Ok(GaussianFit {
        r_squared: 1.0 - ss_res / ss_tot,
        ..fit
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_meets_the_constraint_and_bounds_the_minimum() {
        let g = gaussian_trial(20.0, Weighting::Equal, 90).unwrap();
        assert!((mean_real(&g.amplitudes) - 20.0).abs() < 1e-9);
        // constrained minimum at <N> = 20 is 3.921737...
        assert!(g.value > 3.9217 && g.value < 3.93, "{}", g.value);
    }

    #[test]
    fn fit_recovers_an_exact_profile() {
        let c = profile(30.0, 2.5, 80);
        let fit = gaussian_fit(&SingleModeState::from_real(&c).unwrap()).unwrap();
        assert!((fit.center - 30.0).abs() < 1e-9 && (fit.width - 2.5).abs() < 1e-9);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn fit_rejects_flat_or_tiny_profiles() {
        assert!(gaussian_fit(&SingleModeState::number(3).unwrap()).is_err());
        let flat = SingleModeState::from_real(&[1.0; 6]).unwrap();
        assert!(gaussian_fit(&flat).is_err());
    }
}
