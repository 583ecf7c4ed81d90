//! Seeded separable ensembles and the plane and minimum tables built from
//! them.
//!
//! Every draw comes from a ChaCha8 stream. Samples are produced in fixed
//! chunks, chunk `i` using stream `i` of the seed, so the output is identical
//! for any thread count.

mod fig2;
mod plane;

pub use fig2::{fig2_dataset, Fig2Data, Fig2Method, Fig2Row, InsetDump};
pub use plane::{boundary_scan, fig1_dataset, Fig1Data, Fig1Options, PlanePoint, PointSource};

use crate::error::{Error, Result};
use crate::fock::{ProductComponent, SeparableEnsemble, SingleModeState};
use crate::numeric::find_root;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Samples per RNG stream.
const CHUNK: usize = 256;
/// Largest number of components in a random mixture.
pub const MAX_COMPONENTS: usize = 8;
const COHERENT_LEAKAGE: f64 = 1e-12;

/// Kinds of separable ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `|0> (x) |psi>` with random `|psi>`.
    VacuumProduct,
    /// `|psi_A> (x) |psi_B>` with both factors random.
    RandomProduct,
    /// Dirichlet-weighted mixture of up to eight random products.
    RandomMixture,
    /// Mixture of `|n_k, N - n_k>` at a common total `N`.
    FockMixture,
    /// Mixture of `|alpha_k> (x) |alpha_k + c>` at a common offset `c`.
    CoherentMixture,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::VacuumProduct,
        Family::RandomProduct,
        Family::RandomMixture,
        Family::FockMixture,
        Family::CoherentMixture,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::VacuumProduct => "vacuum_product",
            Family::RandomProduct => "random_product",
            Family::RandomMixture => "random_mixture",
            Family::FockMixture => "fock_mixture",
            Family::CoherentMixture => "coherent_mixture",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the total particle number of each sample is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
enum MeanSpec {
    /// Component totals uniform in `[0, n_max]`.
    UpTo(f64),
    /// Every component at exactly this total.
    Exactly(f64),
}

impl MeanSpec {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            MeanSpec::UpTo(n_max) => n_max * rng.random::<f64>(),
            MeanSpec::Exactly(n) => n,
        }
    }

    fn value(&self) -> f64 {
        match *self {
            MeanSpec::UpTo(n) | MeanSpec::Exactly(n) => n,
        }
    }
}

/// `count` separable ensembles whose component totals `<N>` are drawn
/// uniformly from `[0, n_max]`.
pub fn sample_separable(seed: u64, count: usize, n_max: f64, family: Family) -> Result<Vec<SeparableEnsemble>> {
    sample(seed, count, MeanSpec::UpTo(n_max), family)
}

/// `count` separable ensembles with `<N> = mean_n` for every component. The
/// Fock family rounds `mean_n` to the nearest integer.
pub fn sample_separable_at(seed: u64, count: usize, mean_n: f64, family: Family) -> Result<Vec<SeparableEnsemble>> {
    sample(seed, count, MeanSpec::Exactly(mean_n), family)
}

fn sample(seed: u64, count: usize, spec: MeanSpec, family: Family) -> Result<Vec<SeparableEnsemble>> {
    if count == 0 {
        return Err(Error::Validation("sample count must be at least 1".into()));
    }
    let n = spec.value();
    if !(n >= 0.0) || !n.is_finite() || n > 400.0 {
        return Err(Error::domain("n", n, "[0, 400]"));
    }
    let chunks = count.div_ceil(CHUNK);
    let nested: Vec<Result<Vec<SeparableEnsemble>>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK.min(count - chunk * CHUNK);
            (0..len).map(|_| draw_ensemble(&mut rng, spec, family)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for chunk in nested {
        out.extend(chunk?);
    }
    Ok(out)
}

fn draw_ensemble(rng: &mut ChaCha8Rng, spec: MeanSpec, family: Family) -> Result<SeparableEnsemble> {
    match family {
        Family::VacuumProduct => {
            let total = spec.draw(rng);
            Ok(SeparableEnsemble::pure_product(
                SingleModeState::vacuum(),
                random_state(rng, total)?,
            ))
        }
        Family::RandomProduct => {
            let total = spec.draw(rng);
            let (a, b) = random_product(rng, total)?;
            Ok(SeparableEnsemble::pure_product(a, b))
        }
        Family::RandomMixture => {
            let weights = dirichlet(rng);
            let components = weights
                .into_iter()
                .map(|p| {
                    let total = spec.draw(rng);
                    let (a, b) = random_product(rng, total)?;
                    ProductComponent::new(p, a, b)
                })
                .collect::<Result<Vec<_>>>()?;
            SeparableEnsemble::new(components)
        }
        Family::FockMixture => {
            let total = match spec {
                MeanSpec::UpTo(n_max) => rng.random_range(0..=n_max.floor() as usize),
                MeanSpec::Exactly(n) => n.round() as usize,
            };
            let components = dirichlet(rng)
                .into_iter()
                .map(|p| {
                    let n = rng.random_range(0..=total);
                    ProductComponent::new(
                        p,
                        SingleModeState::number(n)?,
                        SingleModeState::number(total - n)?,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            SeparableEnsemble::new(components)
        }
        Family::CoherentMixture => {
            let weights = dirichlet(rng);
            let totals: Vec<f64> = weights.iter().map(|_| spec.draw(rng)).collect();
            // |alpha|^2 + |alpha + c|^2 = t has a solution for every phase
            // of alpha once |c|^2 <= t.
            let c_max = totals.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();
            let c = Complex64::from_polar(c_max * rng.random::<f64>(), phase(rng));
            let components = weights
                .into_iter()
                .zip(totals)
                .map(|(p, t)| {
                    let dir = Complex64::from_polar(1.0, phase(rng));
                    let b = (dir.conj() * c).re;
                    let disc = (b * b - 2.0 * (c.norm_sqr() - t)).max(0.0);
                    let r = 0.5 * (disc.sqrt() - b);
                    let alpha = dir * r.max(0.0);
                    ProductComponent::new(
                        p,
                        SingleModeState::coherent(alpha, COHERENT_LEAKAGE)?,
                        SingleModeState::coherent(alpha + c, COHERENT_LEAKAGE)?,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            SeparableEnsemble::new(components)
        }
    }
}

fn phase(rng: &mut ChaCha8Rng) -> f64 {
    std::f64::consts::TAU * rng.random::<f64>()
}

/// Weights from a flat Dirichlet over a random number of components.
fn dirichlet(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = rng.random_range(1..=MAX_COMPONENTS);
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // absorb rounding so the weights sum to one to the last bit we can manage
    let drift = 1.0 - w.iter().sum::<f64>();
    w[0] += drift;
    w
}

/// Random product with the total split at a uniform fraction.
fn random_product(rng: &mut ChaCha8Rng, total: f64) -> Result<(SingleModeState, SingleModeState)> {
    let frac = rng.random::<f64>();
    let a = random_state(rng, frac * total)?;
    let b = random_state(rng, (1.0 - frac) * total)?;
    Ok((a, b))
}

/// Random pure state with `<N> = mean` exactly.
///
/// Amplitudes are complex Gaussians damped as `exp(-|n - n0| / s)` around a
/// random centre `n0` near `mean` with a random scale `s`; an exponential
/// tilt `c_n e^{beta n}` then moves the mean onto the target.
pub fn random_state(rng: &mut ChaCha8Rng, mean: f64) -> Result<SingleModeState> {
    if mean <= 0.0 {
        return Ok(SingleModeState::vacuum());
    }
    let center = mean * (0.5 + rng.random::<f64>());
    let scale = 0.3 + (1.0 + mean.sqrt()) * rng.random::<f64>();
    let cutoff = ((center.max(mean) + 25.0 * scale).ceil() as usize + 10).min(crate::tolerance::MAX_CUTOFF);
    // magnitudes are kept as logarithms: the damping alone reaches e^-700
    let (log_mag, phases): (Vec<f64>, Vec<Complex64>) = (0..=cutoff)
        .map(|n| {
            let z = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
            (z.norm().ln() - (n as f64 - center).abs() / scale, Complex64::from_polar(1.0, z.arg()))
        })
        .unzip();
    let beta = tilt_to_mean(&log_mag, mean)?;
    let top = log_mag
        .iter()
        .enumerate()
        .map(|(n, l)| l + beta * n as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let amps = log_mag
        .iter()
        .zip(phases)
        .enumerate()
        .map(|(n, (l, ph))| ph * (l + beta * n as f64 - top).exp())
        .collect();
    SingleModeState::from_unnormalized(amps)
}

/// Tilt `beta` such that `c_n e^{beta n}` has `<N> = mean`, given `ln |c_n|`.
fn tilt_to_mean(log_mag: &[f64], mean: f64) -> Result<f64> {
    let mean_at = |beta: f64| -> f64 {
        let logs: Vec<f64> = log_mag
            .iter()
            .enumerate()
            .map(|(n, l)| 2.0 * (l + beta * n as f64))
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (mut z, mut s) = (0.0, 0.0);
        for (n, l) in logs.iter().enumerate() {
            let e = (l - top).exp();
            z += e;
            s += n as f64 * e;
        }
        s / z
    };
    let mut span = 1.0;
    while !(mean_at(-span) < mean && mean_at(span) > mean) {
        span *= 2.0;
        if span > 1e3 {
            return Err(Error::Convergence {
                method: "sampler",
                detail: format!("cannot tilt a {}-level state to <N> = {mean}", log_mag.len()),
            });
        }
    }
    find_root(|b| mean_at(b) - mean, -span, span, 1e-15, 400).ok_or_else(|| Error::Convergence {
        method: "sampler",
        detail: "tilt root lost its bracket".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilted_states_hit_their_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &mean in &[0.01, 0.7, 5.0, 50.0, 200.0] {
            for _ in 0..20 {
                let s = random_state(&mut rng, mean).unwrap();
                assert!((s.mean_number() - mean).abs() < 1e-9 * (1.0 + mean), "{mean} {}", s.mean_number());
            }
        }
    }

    #[test]
    fn dirichlet_weights_are_a_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let w = dirichlet(&mut rng);
            assert!(!w.is_empty() && w.len() <= MAX_COMPONENTS);
            assert!(w.iter().all(|&x| x >= 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn same_seed_same_ensembles() {
        for family in Family::ALL {
            let a = sample_separable(42, 600, 30.0, family).unwrap();
            let b = sample_separable(42, 600, 30.0, family).unwrap();
            assert_eq!(a, b, "{family}");
        }
    }

    #[test]
    fn fixed_mean_is_respected() {
        for family in Family::ALL {
            for ens in sample_separable_at(5, 40, 12.0, family).unwrap() {
                let m = ens.moments().unwrap();
                assert!((m.mean_n - 12.0).abs() < 1e-8, "{family}: {}", m.mean_n);
            }
        }
    }

    #[test]
    fn zero_count_is_rejected() {
        assert!(sample_separable(1, 0, 10.0, Family::RandomProduct).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::parse(f.name()), Some(f));
        }
    }
}
