use super::moments::SingleModeMoments;
use super::{check_cutoff, check_normalized, normalize};
use crate::error::{Error, Result};
use crate::numeric::ln_factorials;
use crate::tolerance::MAX_CUTOFF;
use num_complex::Complex64;

/// Pure single-mode state `sum_n c_n |n>` for `n = 0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    amps: Vec<Complex64>,
}

impl SingleModeState {
    /// Wraps normalized amplitudes.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Validation("empty amplitude list".into()));
        }
        check_cutoff(amps.len() - 1)?;
        check_normalized(&amps)?;
        Ok(Self { amps })
    }

    /// Normalizes arbitrary (non-zero) amplitudes.
    pub fn from_unnormalized(mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Validation("empty amplitude list".into()));
        }
        check_cutoff(amps.len() - 1)?;
        normalize(&mut amps)?;
        Ok(Self { amps })
    }

    /// Real amplitudes, normalized on construction.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_unnormalized(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn vacuum() -> Self {
        Self {
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Number state `|k>`.
    pub fn number(k: usize) -> Result<Self> {
        check_cutoff(k)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); k + 1];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Coherent state `|alpha>` truncated at the smallest cutoff whose tail
    /// mass is below `leakage_tol`, then renormalized.
    pub fn coherent(alpha: Complex64, leakage_tol: f64) -> Result<Self> {
        if !(leakage_tol > 0.0) {
            return Err(Error::domain("leakage_tol", leakage_tol, "(0, inf)"));
        }
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::Validation("non-finite coherent amplitude".into()));
        }
        let mean = alpha.norm_sqr();
        if mean == 0.0 {
            return Ok(Self::vacuum());
        }
        let ln_mean = mean.ln();
        let lf = ln_factorials(MAX_CUTOFF + 1);
        let ln_weight = |n: usize| -mean + n as f64 * ln_mean - lf[n];
        // Past the peak the Poisson tail beyond n is bounded by a geometric
        // series with ratio mean / (n + 2).
        let mut cutoff = None;
        for n in 0..=MAX_CUTOFF {
            let ratio = mean / (n as f64 + 2.0);
            if ratio < 1.0 {
                let tail = ln_weight(n + 1).exp() / (1.0 - ratio);
                if tail < leakage_tol {
                    cutoff = Some(n);
                    break;
                }
            }
        }
        let cutoff = cutoff.ok_or(Error::Capacity {
            requested: MAX_CUTOFF + 1,
            max: MAX_CUTOFF,
        })?;
        let phase = alpha.arg();
        let amps = (0..=cutoff)
            .map(|n| Complex64::from_polar((0.5 * ln_weight(n)).exp(), phase * n as f64))
            .collect();
        Self::from_unnormalized(amps)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn mean_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// `<a>`.
    pub fn mean_annihilation(&self) -> Complex64 {
        self.amps
            .windows(2)
            .enumerate()
            .map(|(k, w)| w[0].conj() * w[1] * ((k + 1) as f64).sqrt())
            .sum()
    }

    pub fn moments(&self) -> SingleModeMoments {
        SingleModeMoments::of(&self.amps)
    }
}
