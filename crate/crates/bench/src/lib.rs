//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use chns_core::assembly::Discretization;
use chns_core::harness::coarsening_initial_state;
use chns_core::scheme::{Params, State, Stepper};

/// A coarsening stepper on an `nx x nx` mesh with its random initial state.
pub fn coarsening_fixture(nx: usize) -> (Stepper, State) {
    let params = Params::coarsening_preset();
    let disc = Arc::new(Discretization::unit_square(nx).expect("mesh"));
    let state = coarsening_initial_state(&disc, &params, 1).expect("initial state");
    let stepper = Stepper::new(disc, params).expect("operators");
    (stepper, state)
}

/// Deterministic, non-constant test vector.
pub fn test_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| ((i * 7919) % 1000) as f64 / 1000.0 - 0.5)
        .collect()
}
