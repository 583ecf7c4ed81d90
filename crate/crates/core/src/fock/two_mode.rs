use super::moments::{MomentReport, QuadratureMoments};
use super::single::SingleModeState;
use super::{check_cutoff, check_normalized, norm_sqr, normalize, Mode};
use crate::error::{Error, Result};
use crate::numeric::ln_factorials;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense amplitude grid over `|n, m>`, `n <= cutoff_a`, `m <= cutoff_b`,
/// without any normalization requirement. Ladder operators produce these.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeVector {
    amps: Vec<Complex64>,
    dim_a: usize,
    dim_b: usize,
}

impl TwoModeVector {
    pub fn zeros(cutoff_a: usize, cutoff_b: usize) -> Self {
        Self {
            amps: vec![ZERO; (cutoff_a + 1) * (cutoff_b + 1)],
            dim_a: cutoff_a + 1,
            dim_b: cutoff_b + 1,
        }
    }

    pub fn cutoff_a(&self) -> usize {
        self.dim_a - 1
    }

    pub fn cutoff_b(&self) -> usize {
        self.dim_b - 1
    }

    pub fn amp(&self, n: usize, m: usize) -> Complex64 {
        if n < self.dim_a && m < self.dim_b {
            self.amps[n * self.dim_b + m]
        } else {
            ZERO
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<other | self>` over the overlapping grid.
    pub fn inner(&self, other: &TwoModeState) -> Complex64 {
        let mut acc = ZERO;
        for n in 0..self.dim_a.min(other.dim_a) {
            for m in 0..self.dim_b.min(other.dim_b) {
                acc += other.amp(n, m).conj() * self.amp(n, m);
            }
        }
        acc
    }

    /// Normalizes into a state; fails on the zero vector.
    pub fn into_state(mut self) -> Result<TwoModeState> {
        normalize(&mut self.amps)?;
        Ok(TwoModeState {
            amps: self.amps,
            dim_a: self.dim_a,
            dim_b: self.dim_b,
        })
    }
}

/// Normalized pure two-mode state `sum c_{n,m} |n, m>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    amps: Vec<Complex64>,
    dim_a: usize,
    dim_b: usize,
}

impl TwoModeState {
    /// Wraps a row-major grid (`amps[n * (cutoff_b + 1) + m]`).
    pub fn new(cutoff_a: usize, cutoff_b: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cutoff(cutoff_a)?;
        check_cutoff(cutoff_b)?;
        if amps.len() != (cutoff_a + 1) * (cutoff_b + 1) {
            return Err(Error::Validation(format!(
                "grid has {} entries, expected {}",
                amps.len(),
                (cutoff_a + 1) * (cutoff_b + 1)
            )));
        }
        check_normalized(&amps)?;
        Ok(Self {
            amps,
            dim_a: cutoff_a + 1,
            dim_b: cutoff_b + 1,
        })
    }

    /// Builds a state from sparse `(n, m, amplitude)` entries. Duplicate
    /// entries accumulate. With `renormalize` unset the entries must already
    /// be normalized.
    pub fn from_entries(entries: &[(usize, usize, Complex64)], renormalize: bool) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("no amplitude entries".into()));
        }
        let cutoff_a = entries.iter().map(|e| e.0).max().unwrap_or(0);
        let cutoff_b = entries.iter().map(|e| e.1).max().unwrap_or(0);
        check_cutoff(cutoff_a)?;
        check_cutoff(cutoff_b)?;
        let mut v = TwoModeVector::zeros(cutoff_a, cutoff_b);
        for &(n, m, c) in entries {
            v.amps[n * v.dim_b + m] += c;
        }
        if renormalize {
            v.into_state()
        } else {
            Self::new(cutoff_a, cutoff_b, v.amps)
        }
    }

    pub fn vacuum() -> Self {
        Self {
            amps: vec![ONE],
            dim_a: 1,
            dim_b: 1,
        }
    }

    /// `|psi_A> (x) |psi_B>`.
    pub fn product(a: &SingleModeState, b: &SingleModeState) -> Self {
        let (ca, cb) = (a.amplitudes(), b.amplitudes());
        let amps = ca
            .iter()
            .flat_map(|x| cb.iter().map(move |y| x * y))
            .collect();
        Self {
            amps,
            dim_a: ca.len(),
            dim_b: cb.len(),
        }
    }

    /// `2^{-N/2} sum_n sqrt(binom(N, n)) |n, N - n>`: `N` particles sent
    /// through a balanced beam splitter.
    pub fn binomial(total: usize) -> Result<Self> {
        check_cutoff(total)?;
        let lf = ln_factorials(total);
        let half_ln2 = 0.5 * std::f64::consts::LN_2 * total as f64;
        let mut v = TwoModeVector::zeros(total, total);
        for n in 0..=total {
            let ln_amp = 0.5 * (lf[total] - lf[n] - lf[total - n]) - half_ln2;
            v.amps[n * v.dim_b + (total - n)] = Complex64::new(ln_amp.exp(), 0.0);
        }
        v.into_state()
    }

    /// Number-state product `|n, m>`.
    pub fn fock_product(n: usize, m: usize) -> Result<Self> {
        check_cutoff(n)?;
        check_cutoff(m)?;
        let mut v = TwoModeVector::zeros(n, m);
        v.amps[n * v.dim_b + m] = ONE;
        Ok(Self {
            amps: v.amps,
            dim_a: v.dim_a,
            dim_b: v.dim_b,
        })
    }

    /// `|alpha> (x) |alpha + c>`, each mode truncated so its tail mass stays
    /// below `leakage_tol`.
    pub fn coherent_product(alpha: Complex64, c: Complex64, leakage_tol: f64) -> Result<Self> {
        let a = SingleModeState::coherent(alpha, leakage_tol)?;
        let b = SingleModeState::coherent(alpha + c, leakage_tol)?;
        Ok(Self::product(&a, &b))
    }

    /// `(|N, 0> + |0, N>) / sqrt(2)`.
    pub fn cat(total: usize) -> Result<Self> {
        if total == 0 {
            return Err(Error::domain("N", 0.0, "N >= 1"));
        }
        check_cutoff(total)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_entries(
            &[
                (total, 0, Complex64::new(s, 0.0)),
                (0, total, Complex64::new(s, 0.0)),
            ],
            false,
        )
    }

    pub fn cutoff_a(&self) -> usize {
        self.dim_a - 1
    }

    pub fn cutoff_b(&self) -> usize {
        self.dim_b - 1
    }

    pub fn amp(&self, n: usize, m: usize) -> Complex64 {
        if n < self.dim_a && m < self.dim_b {
            self.amps[n * self.dim_b + m]
        } else {
            ZERO
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Iterator over `(n, m, c_{n,m})`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let db = self.dim_b;
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i / db, i % db, c))
    }

    /// Ladder action of `a` or `b`: `c'_{n,m} = sqrt(n+1) c_{n+1,m}` for
    /// mode A. The result keeps the input grid and is not renormalized.
    pub fn apply_annihilation(&self, mode: Mode) -> TwoModeVector {
        let mut out = TwoModeVector::zeros(self.cutoff_a(), self.cutoff_b());
        for n in 0..self.dim_a {
            for m in 0..self.dim_b {
                out.amps[n * self.dim_b + m] = match mode {
                    Mode::A => self.amp(n + 1, m) * ((n + 1) as f64).sqrt(),
                    Mode::B => self.amp(n, m + 1) * ((m + 1) as f64).sqrt(),
                };
            }
        }
        out
    }

    /// `(a - b) |psi>`, unnormalized.
    pub fn apply_difference(&self) -> TwoModeVector {
        let mut out = TwoModeVector::zeros(self.cutoff_a(), self.cutoff_b());
        for n in 0..self.dim_a {
            let sa = ((n + 1) as f64).sqrt();
            for m in 0..self.dim_b {
                let sb = ((m + 1) as f64).sqrt();
                out.amps[n * self.dim_b + m] = self.amp(n + 1, m) * sa - self.amp(n, m + 1) * sb;
            }
        }
        out
    }

    pub fn mean_number(&self) -> f64 {
        self.entries()
            .map(|(n, m, c)| (n + m) as f64 * c.norm_sqr())
            .sum()
    }

    /// Normally ordered first and second moments.
    pub fn quadrature_moments(&self) -> QuadratureMoments {
        let mut q = QuadratureMoments {
            a: ZERO,
            b: ZERO,
            a2: ZERO,
            b2: ZERO,
            ab: ZERO,
            adag_b: ZERO,
            na: 0.0,
            nb: 0.0,
        };
        for n in 0..self.dim_a {
            for m in 0..self.dim_b {
                let c = self.amp(n, m);
                let cc = c.conj();
                let (nf, mf) = (n as f64, m as f64);
                q.na += nf * c.norm_sqr();
                q.nb += mf * c.norm_sqr();
                q.a += cc * self.amp(n + 1, m) * (nf + 1.0).sqrt();
                q.b += cc * self.amp(n, m + 1) * (mf + 1.0).sqrt();
                q.a2 += cc * self.amp(n + 2, m) * ((nf + 1.0) * (nf + 2.0)).sqrt();
                q.b2 += cc * self.amp(n, m + 2) * ((mf + 1.0) * (mf + 2.0)).sqrt();
                q.ab += cc * self.amp(n + 1, m + 1) * ((nf + 1.0) * (mf + 1.0)).sqrt();
                // a^dag b |n, m+1> = sqrt((n+1)(m+1)) |n+1, m>
                q.adag_b += self.amp(n + 1, m).conj()
                    * self.amp(n, m + 1)
                    * ((nf + 1.0) * (mf + 1.0)).sqrt();
            }
        }
        q
    }

    /// All criterion inputs, by direct summation over the basis.
    pub fn moments(&self) -> MomentReport {
        let mean_n = self.mean_number();
        let var_n = self
            .entries()
            .map(|(n, m, c)| ((n + m) as f64 - mean_n).powi(2) * c.norm_sqr())
            .sum();
        let d = self.apply_difference();
        let counting_diff = d.norm_sqr();
        let mean_diff = d.inner(self);
        let var_diff = d
            .amps
            .iter()
            .zip(&self.amps)
            .map(|(x, c)| (x - mean_diff * c).norm_sqr())
            .sum();
        let (epr_x, epr_p, mean_x, mean_p) = self.quadrature_moments().epr();
        MomentReport {
            mean_n,
            var_n,
            mean_diff,
            var_diff,
            counting_diff,
            epr_x,
            epr_p,
            mean_x,
            mean_p,
        }
    }

    pub(crate) fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub(crate) fn from_parts_unchecked(amps: Vec<Complex64>, dim_a: usize, dim_b: usize) -> Self {
        Self { amps, dim_a, dim_b }
    }
}
