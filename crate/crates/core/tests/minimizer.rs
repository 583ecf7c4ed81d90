use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twomode_core::bounds::bound_l;
use twomode_core::minimizer::{
    default_cutoff, gaussian_fit, gaussian_trial_bound, r_functional, recurrence_generate, solve_min_direct,
    solve_min_recurrence,
};
use twomode_core::{Error, SingleModeState, Weighting};

fn poisson_overlap(amps: &[f64], mean: f64) -> f64 {
    let mut ln_fact = 0.0;
    amps.iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            c * (0.5 * (-mean + k as f64 * mean.ln() - ln_fact)).exp()
        })
        .sum()
}

#[test]
fn routes_agree_and_sit_between_the_bounds() {
    for n in [1.0, 5.0, 10.0, 20.0] {
        let cutoff = default_cutoff(n);
        let rec = solve_min_recurrence(n, cutoff).unwrap();
        let dir = solve_min_direct(n, Weighting::Equal, cutoff).unwrap();
        let trial = gaussian_trial_bound(n, Weighting::Equal).unwrap();
        let bound = bound_l(n).unwrap();
        assert!((rec.value - dir.value).abs() < 1e-6, "N = {n}");
        assert!(rec.value >= bound - 1e-9 && rec.value <= trial + 1e-9, "N = {n}");
        assert!(rec.residuals.constraint < 1e-8 && dir.residuals.constraint < 1e-8);
        assert!(dir.residuals.stationarity < 1e-6);
    }
}

#[test]
fn known_minima() {
    // values reached independently by both routes
    for (n, expected) in [(0.25, 0.220171707454), (1.0, 0.622095518864), (20.0, 3.921737238539)] {
        let r = solve_min_direct(n, Weighting::Equal, default_cutoff(n)).unwrap();
        assert!((r.value - expected).abs() < 1e-10, "N = {n}: {}", r.value);
    }
}

#[test]
fn gaussian_trial_is_within_one_percent_at_twenty() {
    let min = solve_min_recurrence(20.0, default_cutoff(20.0)).unwrap();
    let trial = gaussian_trial_bound(20.0, Weighting::Equal).unwrap();
    assert!(trial >= min.value && trial <= 1.01 * min.value);
    let fit = gaussian_fit(&min.state).unwrap();
    assert!(fit.r_squared >= 0.99, "{}", fit.r_squared);
}

#[test]
fn recurrence_parameters_regenerate_the_minimizer() {
    let min = solve_min_recurrence(10.0, default_cutoff(10.0)).unwrap();
    let again = recurrence_generate(&min.params).unwrap();
    let overlap: f64 = again
        .amplitudes()
        .iter()
        .zip(min.state.amplitudes())
        .map(|(x, y)| (x.conj() * y).re)
        .sum();
    assert!((overlap - 1.0).abs() < 1e-8, "{overlap}");
}

#[test]
fn phase_perturbations_never_lower_the_functional() {
    let min = solve_min_direct(15.0, Weighting::Equal, default_cutoff(15.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let amps: Vec<Complex64> = min
            .state
            .amplitudes()
            .iter()
            .map(|c| c * Complex64::from_polar(1.0, rng.random_range(-3.2..3.2)))
            .collect();
        let perturbed = SingleModeState::new(amps).unwrap();
        assert!(r_functional(&perturbed, Weighting::Equal) >= min.value - 1e-12);
    }
}

#[test]
fn heavy_number_weight_selects_a_number_state() {
    for k in [5usize, 20] {
        let r = solve_min_direct(k as f64, Weighting::Weighted(0.99), default_cutoff(k as f64)).unwrap();
        assert!(r.real_amplitudes()[k] > 0.999, "k = {k}");
        assert!((r.value - 0.01 * k as f64).abs() < 1e-9);
        assert!(r.value >= r.bound() - 1e-9);
    }
}

#[test]
fn light_number_weight_approaches_a_coherent_state() {
    for n in [5.0, 20.0] {
        let r = solve_min_direct(n, Weighting::Weighted(0.01), default_cutoff(n)).unwrap();
        assert!(poisson_overlap(&r.real_amplitudes(), n) > 0.99, "N = {n}");
        // the coherent state itself scores w * N
        assert!(r.value <= 0.01 * n + 1e-12 && r.value > 0.5 * 0.01 * n);
    }
}

#[test]
fn vacuum_limit() {
    let r = solve_min_direct(0.01, Weighting::Equal, default_cutoff(0.01)).unwrap();
    assert!(r.value > 0.0 && r.value < 0.02, "{}", r.value);
}

#[test]
fn domain_errors() {
    assert!(matches!(solve_min_recurrence(0.0, 50), Err(Error::Domain { .. })));
    assert!(matches!(solve_min_direct(-1.0, Weighting::Equal, 50), Err(Error::Domain { .. })));
    assert!(matches!(solve_min_direct(5.0, Weighting::Weighted(1.5), 50), Err(Error::Domain { .. })));
    assert!(matches!(solve_min_direct(100.0, Weighting::Equal, 60), Err(Error::Validation(_))));
    assert!(matches!(solve_min_recurrence(5.0, 5000), Err(Error::Capacity { .. })));
}
