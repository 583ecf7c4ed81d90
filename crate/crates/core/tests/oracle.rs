//! Fast moment kernels checked against explicit dense operator matrices.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use proptest::prelude::*;
use twomode_core::criteria::covariance_matrix;
use twomode_core::TwoModeState;

/// Dense grid size of the oracle. States only occupy the lower `FILLED`
/// levels of each mode so quadratic operators are not clipped at the top.
const DIM: usize = 9;
const FILLED: usize = 6;

type M = DMatrix<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn lowering() -> M {
    M::from_fn(DIM, DIM, |r, k| if k == r + 1 { c((k as f64).sqrt()) } else { c(0.0) })
}

/// Operators on the two-mode grid act on `psi[(n, m)]` from the left
/// (mode A) or from the right through the transpose (mode B).
struct Oracle {
    psi: M,
}

impl Oracle {
    fn new(state: &TwoModeState) -> Self {
        let psi = M::from_fn(DIM, DIM, |n, m| state.amp(n, m));
        Self { psi }
    }

    fn a(&self, v: &M) -> M {
        lowering() * v
    }

    fn b(&self, v: &M) -> M {
        v * lowering().transpose()
    }

    fn a_dag(&self, v: &M) -> M {
        lowering().adjoint() * v
    }

    fn b_dag(&self, v: &M) -> M {
        v * lowering().adjoint().transpose()
    }

    fn inner(&self, u: &M, v: &M) -> Complex64 {
        u.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum()
    }

    fn expect(&self, v: &M) -> Complex64 {
        self.inner(&self.psi, v)
    }

    fn number(&self, v: &M) -> M {
        self.a_dag(&self.a(v)) + self.b_dag(&self.b(v))
    }

    fn quadratures(&self) -> [M; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = &self.psi;
        let i = Complex64::new(0.0, 1.0);
        [
            (self.a(p) + self.a_dag(p)) * c(s),
            (self.a(p) - self.a_dag(p)) * (-i * s),
            (self.b(p) + self.b_dag(p)) * c(s),
            (self.b(p) - self.b_dag(p)) * (-i * s),
        ]
    }

    /// Variance of a Hermitian operator given its image of psi.
    fn variance(&self, image: &M) -> f64 {
        let mean = self.expect(image).re;
        self.inner(image, image).re - mean * mean
    }
}

fn grid_state(values: &[f64]) -> TwoModeState {
    let amps: Vec<Complex64> = values.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let amps = amps.into_iter().map(|z| z / norm).collect();
    TwoModeState::new(FILLED - 1, FILLED - 1, amps).unwrap()
}

fn state_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * FILLED * FILLED)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_match_dense_operators(values in state_values()) {
        let state = grid_state(&values);
        let o = Oracle::new(&state);
        let m = state.moments();

        let n_psi = o.number(&o.psi);
        prop_assert!((m.mean_n - o.expect(&n_psi).re).abs() < 1e-12);
        prop_assert!((m.var_n - o.variance(&n_psi)).abs() < 1e-11);

        let d = o.a(&o.psi) - o.b(&o.psi);
        let counting = o.inner(&d, &d).re;
        let mean_diff = o.expect(&d);
        prop_assert!((m.counting_diff - counting).abs() < 1e-12);
        prop_assert!((m.mean_diff - mean_diff).norm() < 1e-12);
        prop_assert!((m.var_diff - (counting - mean_diff.norm_sqr())).abs() < 1e-11);

        let [xa, pa, xb, pb] = o.quadratures();
        prop_assert!((m.epr_x - o.variance(&(&xa + &xb))).abs() < 1e-11);
        prop_assert!((m.epr_p - o.variance(&(&pa - &pb))).abs() < 1e-11);
    }

    #[test]
    fn covariance_matches_dense_quadratures(values in state_values()) {
        let state = grid_state(&values);
        let o = Oracle::new(&state);
        let r = o.quadratures();
        let means: Vec<f64> = r.iter().map(|x| o.expect(x).re).collect();
        let centred: Vec<M> = r.iter().zip(&means).map(|(x, &mu)| x - &o.psi * c(mu)).collect();
        let gamma = Matrix4::from_fn(|k, l| 2.0 * o.inner(&centred[k], &centred[l]).re);
        let report = covariance_matrix(&state);
        prop_assert!((report.gamma - gamma).abs().max() < 1e-11, "{} vs {}", report.gamma, gamma);

        // smallest eigenvalue of the partially transposed test matrix
        let flip = [1.0, 1.0, 1.0, -1.0];
        let j = twomode_core::criteria::symplectic_j();
        let test = DMatrix::from_fn(4, 4, |k, l| {
            Complex64::new(flip[k] * flip[l] * gamma[(k, l)], -j[(k, l)])
        });
        let min_eig = test.symmetric_eigenvalues().min();
        prop_assert!((report.min_eig - min_eig).abs() < 1e-10);
    }

    #[test]
    fn beam_splitter_counts_match_the_difference_operator(values in state_values()) {
        let state = grid_state(&values);
        let out = state.beam_splitter().unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let nb: f64 = out.entries().map(|(_, m, z)| m as f64 * z.norm_sqr()).sum();
        prop_assert!((2.0 * nb - state.moments().counting_diff).abs() < 1e-11);
    }
}

#[test]
fn commutators_hold_below_the_truncation_edge() {
    let values: Vec<f64> = (0..2 * FILLED * FILLED).map(|k| ((k * 37 % 11) as f64 - 5.0) / 7.0).collect();
    let o = Oracle::new(&grid_state(&values));
    let p = &o.psi;
    let comm_a = o.a(&o.a_dag(p)) - o.a_dag(&o.a(p));
    let comm_ab = o.a(&o.b_dag(p)) - o.b_dag(&o.a(p));
    assert!((comm_a - p).norm() < 1e-12);
    assert!(comm_ab.norm() < 1e-12);
}

#[test]
fn binomial_epr_sum_matches_dense_operators() {
    for total in [1usize, 2, 3] {
        let state = TwoModeState::binomial(total).unwrap();
        let o = Oracle::new(&state);
        let [xa, pa, xb, pb] = o.quadratures();
        let dense = o.variance(&(&xa + &xb)) + o.variance(&(&pa - &pb));
        let lhs = state.moments().epr_x + state.moments().epr_p;
        assert!((dense - (2.0 * total as f64 + 2.0)).abs() < 1e-12);
        assert!((lhs - dense).abs() < 1e-12);
    }
}
