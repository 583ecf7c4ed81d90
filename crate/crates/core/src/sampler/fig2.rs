use crate::bounds::bound_l;
use crate::error::{Error, Result};
use crate::minimizer::{
    default_cutoff, gaussian_fit, gaussian_trial, solve_min_direct, solve_min_recurrence, GaussianFit, MinMethod,
    MinResult, Residuals, Weighting,
};
use rayon::prelude::*;

/// Which minimizer routes populate the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig2Method {
    Recurrence,
    Direct,
    Both,
}

impl Fig2Method {
    fn methods(&self) -> &'static [MinMethod] {
        match self {
            Fig2Method::Recurrence => &[MinMethod::Recurrence],
            Fig2Method::Direct => &[MinMethod::Direct],
            Fig2Method::Both => &[MinMethod::Recurrence, MinMethod::Direct],
        }
    }
}

/// One minimisation. A failed solve keeps its row with the error text.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Row {
    pub target_n: f64,
    pub method: MinMethod,
    pub bound: f64,
    pub value: Option<f64>,
    pub gaussian_trial: Option<f64>,
    pub residuals: Option<Residuals>,
    pub error: Option<String>,
}

impl Fig2Row {
    pub fn gap(&self) -> Option<f64> {
        self.value.map(|v| v - self.bound)
    }
}

/// Minimising amplitudes at one target with their Gaussian fit.
#[derive(Debug, Clone, PartialEq)]
pub struct InsetDump {
    pub target_n: f64,
    pub method: MinMethod,
    pub amplitudes: Vec<f64>,
    pub fit: GaussianFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Data {
    pub rows: Vec<Fig2Row>,
    pub inset: InsetDump,
}

/// Target at which the amplitude profile is dumped.
pub const INSET_TARGET: f64 = 20.0;

fn solve(target: f64, method: MinMethod) -> Result<MinResult> {
    let cutoff = default_cutoff(target);
    match method {
        MinMethod::Recurrence => solve_min_recurrence(target, cutoff),
        MinMethod::Direct => solve_min_direct(target, Weighting::Equal, cutoff),
    }
}

/// Constrained minima of the unweighted functional over `n_grid`, paired
/// with the analytic bound, plus the amplitude profile at `<N_A> = 20`.
pub fn fig2_dataset(n_grid: &[f64], method: Fig2Method) -> Result<Fig2Data> {
    for &n in n_grid {
        if !(n > 0.0 && n <= 400.0) {
            return Err(Error::domain("n", n, "(0, 400]"));
        }
    }
    let jobs: Vec<(f64, MinMethod)> = n_grid
        .iter()
        .flat_map(|&n| method.methods().iter().map(move |&m| (n, m)))
        .collect();
    let rows: Vec<Fig2Row> = jobs
        .par_iter()
        .map(|&(target_n, m)| {
            let bound = bound_l(target_n).unwrap_or(f64::NAN);
            let trial = gaussian_trial(target_n, Weighting::Equal, default_cutoff(target_n))
                .ok()
                .map(|g| g.value);
            match solve(target_n, m) {
                Ok(r) => Fig2Row {
                    target_n,
                    method: m,
                    bound,
                    value: Some(r.value),
                    gaussian_trial: trial,
                    residuals: Some(r.residuals),
                    error: None,
                },
                Err(e) => Fig2Row {
                    target_n,
                    method: m,
                    bound,
                    value: None,
                    gaussian_trial: trial,
                    residuals: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let inset_method = method.methods()[0];
    let min = solve(INSET_TARGET, inset_method)?;
    let fit = gaussian_fit(&min.state)?;
    Ok(Fig2Data {
        rows,
        inset: InsetDump {
            target_n: INSET_TARGET,
            method: inset_method,
            amplitudes: min.real_amplitudes(),
            fit,
        },
    })
}
