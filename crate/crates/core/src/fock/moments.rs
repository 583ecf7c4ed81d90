use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::SQRT_2;

/// Moments of a pure single-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeMoments {
    pub mean_n: f64,
    pub var_n: f64,
    /// `<a>`
    pub mean_a: Complex64,
    /// `<a^dag a> - |<a>|^2`
    pub var_a: f64,
    /// `<a^2>`
    pub mean_a2: Complex64,
}

impl SingleModeMoments {
    pub(crate) fn of(amps: &[Complex64]) -> Self {
        let mean_n: f64 = amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        let var_n = amps
            .iter()
            .enumerate()
            .map(|(n, c)| (n as f64 - mean_n).powi(2) * c.norm_sqr())
            .sum();
        let mut mean_a = Complex64::new(0.0, 0.0);
        let mut mean_a2 = Complex64::new(0.0, 0.0);
        for k in 0..amps.len() {
            if k + 1 < amps.len() {
                mean_a += amps[k].conj() * amps[k + 1] * ((k + 1) as f64).sqrt();
            }
            if k + 2 < amps.len() {
                mean_a2 += amps[k].conj() * amps[k + 2] * (((k + 1) * (k + 2)) as f64).sqrt();
            }
        }
        // ||(a - <a>) psi||^2 keeps the variance non-negative without cancellation.
        let var_a = (0..amps.len())
            .map(|k| {
                let lowered = amps
                    .get(k + 1)
                    .map_or(Complex64::new(0.0, 0.0), |c| c * ((k + 1) as f64).sqrt());
                (lowered - mean_a * amps[k]).norm_sqr()
            })
            .sum();
        Self {
            mean_n,
            var_n,
            mean_a,
            var_a,
            mean_a2,
        }
    }

    fn var_x(&self) -> f64 {
        self.mean_a2.re + self.mean_n + 0.5 - 2.0 * self.mean_a.re * self.mean_a.re
    }

    fn var_p(&self) -> f64 {
        -self.mean_a2.re + self.mean_n + 0.5 - 2.0 * self.mean_a.im * self.mean_a.im
    }
}

/// First and second normally ordered moments of a two-mode state, enough to
/// assemble any quadrature covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub a: Complex64,
    pub b: Complex64,
    pub a2: Complex64,
    pub b2: Complex64,
    pub ab: Complex64,
    /// `<a^dag b>`
    pub adag_b: Complex64,
    pub na: f64,
    pub nb: f64,
}

/// The measured quantities every variance criterion consumes.
///
/// `var_diff` is the non-Hermitian variance of `a - b`, i.e.
/// `<(a^dag - b^dag)(a - b)> - |<a - b>|^2`, and `counting_diff` is the first
/// term alone. `epr_x` and `epr_p` are the variances of `x_A + x_B` and
/// `p_A - p_B`; their means are carried so mixtures can be formed exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean_n: f64,
    pub var_n: f64,
    #[serde(serialize_with = "ser_complex")]
    pub mean_diff: Complex64,
    pub var_diff: f64,
    pub counting_diff: f64,
    pub epr_x: f64,
    pub epr_p: f64,
    pub mean_x: f64,
    pub mean_p: f64,
}

fn ser_complex<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&c.re)?;
    t.serialize_element(&c.im)?;
    t.end()
}

impl MomentReport {
    /// Report of the product state `|psi_A> (x) |psi_B>`.
    pub fn product(a: &SingleModeMoments, b: &SingleModeMoments) -> Self {
        let mean_diff = a.mean_a - b.mean_a;
        let var_diff = a.var_a + b.var_a;
        Self {
            mean_n: a.mean_n + b.mean_n,
            var_n: a.var_n + b.var_n,
            mean_diff,
            var_diff,
            counting_diff: var_diff + mean_diff.norm_sqr(),
            epr_x: a.var_x() + b.var_x(),
            epr_p: a.var_p() + b.var_p(),
            mean_x: SQRT_2 * (a.mean_a.re + b.mean_a.re),
            mean_p: SQRT_2 * (a.mean_a.im - b.mean_a.im),
        }
    }

    /// Moments of the convex mixture `sum_k p_k rho_k`.
    ///
    /// Means are averaged; variances follow the law of total variance, so
    /// the result is the variance of the mixture rather than the average of
    /// component variances.
    pub fn mixture<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a MomentReport)>,
    {
        let parts: Vec<(f64, &MomentReport)> = parts.into_iter().collect();
        if parts.is_empty() {
            return Err(Error::Validation("empty mixture".into()));
        }
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if parts.iter().any(|(p, _)| !(*p >= 0.0)) || !(total > 0.0) {
            return Err(Error::Validation("mixture weights must be non-negative".into()));
        }
        let avg = |f: &dyn Fn(&MomentReport) -> f64| -> f64 {
            parts.iter().map(|(p, r)| p * f(r)).sum::<f64>() / total
        };
        let mean_n = avg(&|r| r.mean_n);
        let mean_x = avg(&|r| r.mean_x);
        let mean_p = avg(&|r| r.mean_p);
        let mean_diff = parts
            .iter()
            .map(|(p, r)| r.mean_diff * *p)
            .sum::<Complex64>()
            / total;
        Ok(Self {
            mean_n,
            var_n: avg(&|r| r.var_n + (r.mean_n - mean_n).powi(2)),
            mean_diff,
            var_diff: avg(&|r| r.var_diff + (r.mean_diff - mean_diff).norm_sqr()),
            counting_diff: avg(&|r| r.counting_diff),
            epr_x: avg(&|r| r.epr_x + (r.mean_x - mean_x).powi(2)),
            epr_p: avg(&|r| r.epr_p + (r.mean_p - mean_p).powi(2)),
            mean_x,
            mean_p,
        })
    }

    /// Synthetic report carrying only the plane coordinates; useful for
    /// probing criterion thresholds directly.
    pub fn synthetic(mean_n: f64, var_n: f64, var_diff: f64, counting_diff: f64) -> Self {
        let mean_abs = (counting_diff - var_diff).max(0.0).sqrt();
        Self {
            mean_n,
            var_n,
            mean_diff: Complex64::new(mean_abs, 0.0),
            var_diff,
            counting_diff,
            epr_x: f64::NAN,
            epr_p: f64::NAN,
            mean_x: f64::NAN,
            mean_p: f64::NAN,
        }
    }
}

impl QuadratureMoments {
    pub(crate) fn epr(&self) -> (f64, f64, f64, f64) {
        let mean_x = SQRT_2 * (self.a.re + self.b.re);
        let mean_p = SQRT_2 * (self.a.im - self.b.im);
        let xa2 = self.a2.re + self.na + 0.5;
        let xb2 = self.b2.re + self.nb + 0.5;
        let pa2 = -self.a2.re + self.na + 0.5;
        let pb2 = -self.b2.re + self.nb + 0.5;
        let xaxb = self.ab.re + self.adag_b.re;
        let papb = self.adag_b.re - self.ab.re;
        let epr_x = xa2 + xb2 + 2.0 * xaxb - mean_x * mean_x;
        let epr_p = pa2 + pb2 - 2.0 * papb - mean_p * mean_p;
        (epr_x, epr_p, mean_x, mean_p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_reports_reproduce_the_counting_gap() {
        let m = MomentReport::synthetic(10.0, 1.0, 2.0, 6.0);
        assert!((m.counting_diff - m.var_diff - m.mean_diff.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn mixture_of_one_is_identity() {
        let m = MomentReport::synthetic(3.0, 0.5, 0.25, 0.25);
        let mixed = MomentReport::mixture([(2.0, &m)]).unwrap();
        assert_eq!(mixed.var_n, m.var_n);
        assert_eq!(mixed.mean_n, m.mean_n);
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        let m = MomentReport::synthetic(1.0, 0.0, 0.0, 0.0);
        assert!(MomentReport::mixture(std::iter::empty()).is_err());
        assert!(MomentReport::mixture([(-1.0, &m), (2.0, &m)]).is_err());
        assert!(MomentReport::mixture([(0.0, &m)]).is_err());
    }
}
