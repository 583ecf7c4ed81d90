use super::check_cutoff;
use super::two_mode::TwoModeState;
use crate::error::Result;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

impl TwoModeState {
    /// Balanced beam splitter: re-expresses the state in the rotated modes
    /// `a' = (a + b)/sqrt(2)`, `b' = (a - b)/sqrt(2)`. The output amplitude
    /// at `(n', m')` belongs to `|n'>_{a'} |m'>_{b'}`, so the number of
    /// particles counted in `b'` is half of `<(a^dag - b^dag)(a - b)>` of the
    /// input.
    ///
    /// Each total-number block is rotated separately. Images of basis
    /// vectors are built by repeated application of the rotated creation
    /// operators, `a^dag -> (a'^dag + b'^dag)/sqrt(2)` and
    /// `b^dag -> (a'^dag - b'^dag)/sqrt(2)`, which keeps every intermediate
    /// column a unit vector.
    pub fn beam_splitter(&self) -> Result<TwoModeState> {
        let (dim_a, dim_b) = self.dims();
        let kmax = self
            .entries()
            .filter(|(_, _, c)| c.norm_sqr() > 0.0)
            .map(|(n, m, _)| n + m)
            .max()
            .unwrap_or(0);
        check_cutoff(kmax)?;
        let dim = kmax + 1;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        out[0] = self.amp(0, 0);

        // columns[n][n'] = <n', k - n'| U |n, k - n> for the current block k
        let mut columns: Vec<Vec<f64>> = vec![vec![1.0]];
        for k in 1..=kmax {
            let mut next = Vec::with_capacity(k + 1);
            for n in 0..=k {
                let (src, sign, count) = if n == 0 {
                    (&columns[0], -1.0, k)
                } else {
                    (&columns[n - 1], 1.0, n)
                };
                let scale = FRAC_1_SQRT_2 / (count as f64).sqrt();
                let mut col = vec![0.0; k + 1];
                for (np, &v) in src.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    // source basis vector is |np, k-1-np> in the primed modes
                    col[np + 1] += scale * v * ((np + 1) as f64).sqrt();
                    col[np] += sign * scale * v * ((k - np) as f64).sqrt();
                }
                next.push(col);
            }
            columns = next;

            let n_lo = k.saturating_sub(dim_b - 1);
            let n_hi = k.min(dim_a - 1);
            for (n, column) in columns.iter().enumerate().take(n_hi + 1).skip(n_lo) {
                let c = self.amp(n, k - n);
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                for (np, &u) in column.iter().enumerate() {
                    out[np * dim + (k - np)] += c * u;
                }
            }
        }
        Ok(TwoModeState::from_parts_unchecked(out, dim, dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SingleModeState;

    #[test]
    fn single_photons_split_with_opposite_signs() {
        let out = TwoModeState::fock_product(1, 0).unwrap().beam_splitter().unwrap();
        assert!((out.amp(1, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amp(0, 1).re - FRAC_1_SQRT_2).abs() < 1e-15);
        let out = TwoModeState::fock_product(0, 1).unwrap().beam_splitter().unwrap();
        assert!((out.amp(1, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amp(0, 1).re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn binomial_state_recombines_into_one_port() {
        let out = TwoModeState::binomial(12).unwrap().beam_splitter().unwrap();
        assert!((out.amp(12, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counts_in_the_difference_port() {
        let a = SingleModeState::from_real(&[0.3, 0.5, 0.2, 0.6]).unwrap();
        let b = SingleModeState::from_real(&[0.7, -0.1, 0.4]).unwrap();
        let s = TwoModeState::product(&a, &b);
        let out = s.beam_splitter().unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-13);
        let nb: f64 = out.entries().map(|(_, m, c)| m as f64 * c.norm_sqr()).sum();
        assert!((nb - 0.5 * s.moments().counting_diff).abs() < 1e-12);
        assert!((out.mean_number() - s.mean_number()).abs() < 1e-12);
    }
}
