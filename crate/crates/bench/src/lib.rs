//! Fixtures shared by the benchmarks.

use golflab::model::sample_initial_cycle;
use golflab::{CycleConfig, Seed};

/// Uniform configuration with `n_l = n / 2` remaining holes on a full cycle.
pub fn half_filled_cycle(n: usize, seed: u64) -> CycleConfig {
    let nb = n / 4;
    sample_initial_cycle(n, nb, n - nb, &mut Seed(seed).rng()).expect("valid census")
}
