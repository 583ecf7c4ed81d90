//! Shared workloads for the criterion benchmarks.

use twomode_core::{SeparableEnsemble, TwoModeState};

/// Binomial interference state used as the standard heavy input.
pub fn binomial_fixture(total: usize) -> TwoModeState {
    TwoModeState::binomial(total).expect("binomial fixture within capacity")
}

/// Fixed-seed mixture ensembles for throughput measurements.
pub fn mixture_fixture(count: usize) -> Vec<SeparableEnsemble> {
    twomode_core::sampler::sample_separable(7, count, 50.0, twomode_core::Family::RandomMixture)
        .expect("mixture fixture draws")
}
