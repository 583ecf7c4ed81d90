//! Truncated Fock-space states for one and two bosonic modes.
//!
//! Amplitudes are stored densely. Two-mode grids are row-major in the mode-A
//! number, so amplitude `c[n][m]` of `|n, m>` sits at `n * dim_b + m`.
//! Mixed states only appear as convex lists of pure products
//! ([`SeparableEnsemble`]); every quantity the criteria need is an
//! expectation value, so no density-matrix type exists.

mod beam_splitter;
mod ensemble;
mod moments;
mod single;
mod two_mode;

pub use ensemble::{ensemble_moments, ProductComponent, SeparableEnsemble};
pub use moments::{MomentReport, QuadratureMoments, SingleModeMoments};
pub use single::SingleModeState;
pub use two_mode::{TwoModeState, TwoModeVector};

use crate::error::{Error, Result};
use crate::tolerance::{MAX_CUTOFF, NORMALIZATION};
use num_complex::Complex64;

/// Which of the two modes an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

pub(crate) fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff > MAX_CUTOFF {
        Err(Error::Capacity {
            requested: cutoff,
            max: MAX_CUTOFF,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|c| c.norm_sqr()).sum()
}

pub(crate) fn check_normalized(amps: &[Complex64]) -> Result<()> {
    if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Validation("non-finite amplitude".into()));
    }
    let n = norm_sqr(amps);
    if (n - 1.0).abs() > NORMALIZATION {
        return Err(Error::Validation(format!(
            "state is not normalized: sum |c|^2 = {n}"
        )));
    }
    Ok(())
}

pub(crate) fn normalize(amps: &mut [Complex64]) -> Result<()> {
    let n = norm_sqr(amps);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Validation(format!(
            "cannot normalize a vector with squared norm {n}"
        )));
    }
    let inv = 1.0 / n.sqrt();
    amps.iter_mut().for_each(|c| *c *= inv);
    Ok(())
}
